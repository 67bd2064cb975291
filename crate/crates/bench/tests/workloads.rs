use consortium_bench::{chains, ledger, log_bytes, transactions};
use consortium_core::ledger::{decode_log, replay, verify_integrity};
use consortium_core::{run_sharing, Phase};

#[test]
fn chains_are_valid_and_seeded() {
    let a = chains(20);
    assert_eq!(a, chains(20));
    assert!(a.iter().all(|chain| run_sharing(chain).is_ok()));
}

#[test]
fn ledger_workload_round_trips() {
    let ledger = ledger(3);
    assert_eq!(ledger.len(), transactions(3).len());
    assert!((1..=3).all(|id| ledger.state(id).unwrap().phase == Phase::Computed));
    let entries = decode_log(&log_bytes(&ledger)).unwrap();
    assert!(verify_integrity(&entries));
    assert_eq!(&replay(&entries).unwrap(), ledger.states());
}
