//! Seeded workloads shared by the benchmarks.

use consortium_core::ledger::encode_record;
use consortium_core::testkit::{self, build_transactions, random_chain};
use consortium_core::{Ledger, SupplyChain, Transaction};

pub const SEED: u64 = 7;

/// `count` valid chains drawn from one seed.
pub fn chains(count: usize) -> Vec<SupplyChain> {
    let mut rng = testkit::rng(SEED);
    (0..count).map(|_| random_chain(&mut rng, 1)).collect()
}

/// Build sequences for `requests` chains, one request id each, run included.
pub fn transactions(requests: u64) -> Vec<Transaction> {
    let mut rng = testkit::rng(SEED);
    (1..=requests)
        .flat_map(|id| build_transactions(&random_chain(&mut rng, id), &format!("urn:bench:{id}"), true))
        .collect()
}

pub fn ledger(requests: u64) -> Ledger {
    let mut ledger = Ledger::new();
    for tx in transactions(requests) {
        ledger.append(tx).expect("build sequences apply");
    }
    ledger
}

/// The on-disk encoding of `ledger`.
pub fn log_bytes(ledger: &Ledger) -> Vec<u8> {
    ledger.entries().iter().flat_map(encode_record).collect()
}
