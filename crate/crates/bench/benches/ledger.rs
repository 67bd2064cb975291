use consortium_core::ledger::{decode_log, replay, verify_integrity};
use consortium_core::Ledger;
use criterion::{criterion_group, criterion_main, BatchSize, Criterion, Throughput};

fn ledger(c: &mut Criterion) {
    let txs = consortium_bench::transactions(10);
    let mut group = c.benchmark_group("ledger");
    group.throughput(Throughput::Elements(txs.len() as u64));
    group.bench_function("append", |b| {
        b.iter_batched(
            || txs.clone(),
            |txs| {
                let mut ledger = Ledger::new();
                for tx in txs {
                    ledger.append(tx).unwrap();
                }
                ledger
            },
            BatchSize::SmallInput,
        )
    });

    let bytes = consortium_bench::log_bytes(&consortium_bench::ledger(10));
    group.bench_function("decode_verify_replay", |b| {
        b.iter(|| {
            let entries = decode_log(&bytes).unwrap();
            assert!(verify_integrity(&entries));
            replay(&entries).unwrap()
        })
    });
    group.finish();
}

criterion_group!(benches, ledger);
criterion_main!(benches);
