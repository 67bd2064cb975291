use consortium_core::canonical::Digest;
use consortium_core::ledger::{decode_log, encode_record, replay, state_hash, verify_integrity, WorldState};
use consortium_core::model::GroupId;
use consortium_core::testkit::{self, build_transactions};
use consortium_core::{run_sharing, Ledger, LedgerError, Phase, Transaction, TxKind};
use proptest::prelude::*;
use serde_json::json;

const EMPTY_STATE_HASH: &str = "44136fa355b3678a1146ad16f7e8649e94fb4fc21fe77e8310c060f61caaff8a";

fn built(txs: &[Transaction]) -> Ledger {
    let mut ledger = Ledger::new();
    for tx in txs {
        let _ = ledger.append(tx.clone());
    }
    ledger
}

fn log_bytes(ledger: &Ledger) -> Vec<u8> {
    ledger.entries().iter().flat_map(encode_record).collect()
}

#[test]
fn genesis_block() {
    let chain = testkit::mini_chain();
    let mut ledger = Ledger::new();
    let block = ledger.append(Transaction::create_request(&chain.header, "urn:actor", 1)).unwrap();
    assert_eq!(block.sequence, 0);
    assert_eq!(block.prev_hash, Digest::ZERO);
    assert_eq!(ledger.state(1).unwrap().phase, Phase::Open);
    assert_eq!(ledger.states().len(), 1);
}

#[test]
fn empty_ledger() {
    let ledger = Ledger::new();
    assert_eq!(ledger.state_hash().to_hex(), EMPTY_STATE_HASH);
    assert_eq!(state_hash(&WorldState::new()), Digest::of(b"{}"));
    assert!(replay(&[]).unwrap().is_empty());
    assert!(verify_integrity(&[]));
    assert_eq!(ledger.head_hash(), Digest::ZERO);
}

#[test]
fn listing_build_sequence_computes() {
    let chain = testkit::listing_chain();
    let ledger = {
        let mut ledger = Ledger::new();
        for tx in build_transactions(&chain, "urn:originator", true) {
            ledger.append(tx).unwrap();
        }
        ledger
    };
    let state = ledger.state(1).unwrap();
    assert_eq!(state.phase, Phase::Computed);
    assert_eq!(state.chain, chain);
    assert_eq!(state.result.as_ref().unwrap(), &run_sharing(&chain).unwrap());
    assert_eq!(&replay(ledger.entries()).unwrap(), ledger.states());
}

#[test]
fn phase_guards() {
    let chain = testkit::mini_chain();
    let txs = build_transactions(&chain, "urn:a", false);
    let mut ledger = built(&txs);
    assert_eq!(ledger.state(1).unwrap().phase, Phase::Sealed);

    let supply = &chain.levels[0].resources[0].supplies[0];
    let err = ledger
        .append(Transaction::add_supply(1, GroupId::new(1, 1), supply, "urn:a", 99))
        .unwrap_err();
    assert_eq!(
        err,
        LedgerError::IllegalTransition { request_id: 1, phase: Phase::Sealed, kind: TxKind::AddSupply }
    );
    ledger.append(Transaction::run(1, "urn:a", 100)).unwrap();
    let err = ledger.append(Transaction::run(1, "urn:a", 101)).unwrap_err();
    assert_eq!(err.code(), "ILLEGAL_TRANSITION");
    let err = ledger.append(Transaction::seal(1, "urn:a", 102)).unwrap_err();
    assert_eq!(err.code(), "ILLEGAL_TRANSITION");
    assert_eq!(ledger.state(1).unwrap().phase, Phase::Computed);
}

#[test]
fn request_errors() {
    let chain = testkit::mini_chain();
    let mut ledger = Ledger::new();
    assert_eq!(ledger.append(Transaction::seal(7, "a", 1)).unwrap_err(), LedgerError::UnknownRequest(7));
    ledger.append(Transaction::create_request(&chain.header, "a", 1)).unwrap();
    let err = ledger.append(Transaction::create_request(&chain.header, "a", 2)).unwrap_err();
    assert_eq!(err.code(), "ILLEGAL_TRANSITION");

    let supply = &chain.levels[0].resources[0].supplies[0];
    let err = ledger.append(Transaction::add_supply(1, GroupId::new(1, 1), supply, "a", 3)).unwrap_err();
    assert_eq!(err.code(), "UNKNOWN_RESOURCE_GROUP");

    let err = ledger.append(Transaction::seal(1, "", 4)).unwrap_err();
    assert_eq!(err, LedgerError::InvalidActor);

    let err = ledger.append(Transaction::seal(1, "a", 5)).unwrap_err();
    let LedgerError::ValidationFailed(report) = err else { panic!("expected validation failure") };
    assert!(!report.is_valid());

    let bad = Transaction::new(TxKind::AddFinancialService, 1, "a", json!({"invested": "lots"}), 6);
    assert_eq!(ledger.append(bad).unwrap_err().code(), "SCHEMA_VIOLATION");
    assert_eq!(ledger.len(), 1);
}

#[test]
fn payloads_are_canonicalized() {
    let chain = testkit::mini_chain();
    let mut ledger = Ledger::new();
    ledger.append(Transaction::create_request(&chain.header, "a", 1)).unwrap();
    let loose = Transaction::new(
        TxKind::SetSharingOptions,
        1,
        "a",
        json!({"scheme": "RS"}),
        2,
    );
    ledger.append(loose).unwrap();
    let stored = &ledger.entries()[1].transaction.payload;
    assert_eq!(
        stored,
        &json!({"scheme": "RS", "costPolicy": "SHARED", "investorPrincipalIncluded": true})
    );
    assert!(verify_integrity(ledger.entries()));
}

#[test]
fn three_block_log_and_broken_link() {
    let chain = testkit::mini_chain();
    let ledger = built(&build_transactions(&chain, "a", true)[..3]);
    assert_eq!(ledger.len(), 3);
    assert!(ledger.verify());
    let mut entries = ledger.entries().to_vec();
    entries[1].block.prev_hash = Digest::of(b"elsewhere");
    assert!(!verify_integrity(&entries));
    assert_eq!(replay(&entries).unwrap_err().code(), "CORRUPT_LOG");
}

#[test]
fn tampered_payload_is_corrupt() {
    let chain = testkit::mini_chain();
    let ledger = built(&build_transactions(&chain, "a", true));
    let mut entries = ledger.entries().to_vec();
    entries[0].transaction.payload["p"] = json!(451);
    assert_eq!(replay(&entries).unwrap_err().code(), "CORRUPT_LOG");

    let mut bytes = log_bytes(&ledger);
    let at = bytes.windows(7).position(|w| w == b"\"p\":450").unwrap() + 4;
    bytes[at] = b'5';
    let detected = decode_log(&bytes).map(|e| Ledger::from_entries(e).is_err()).unwrap_or(true);
    assert!(detected);
}

#[test]
fn every_byte_of_a_small_log_is_guarded() {
    let ledger = built(&build_transactions(&testkit::mini_chain(), "a", true));
    let bytes = log_bytes(&ledger);
    assert_eq!(decode_log(&bytes).unwrap(), ledger.entries());
    for at in 0..bytes.len() {
        let mut copy = bytes.clone();
        copy[at] ^= 0x01;
        let detected = decode_log(&copy).map(|e| Ledger::from_entries(e).is_err()).unwrap_or(true);
        assert!(detected, "flip at byte {at} went unnoticed");
    }
}

#[test]
fn log_file_survives_reopen() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("ledger.log");
    let txs = build_transactions(&testkit::listing_chain(), "urn:o", true);
    let hash = {
        let mut ledger = Ledger::open(&path).unwrap();
        for tx in &txs {
            ledger.append(tx.clone()).unwrap();
        }
        ledger.state_hash()
    };
    let mut reopened = Ledger::open(&path).unwrap();
    assert_eq!(reopened.len(), txs.len());
    assert_eq!(reopened.state_hash(), hash);
    let extra = build_transactions(&testkit::random_chain(&mut testkit::rng(5), 2), "urn:o", false);
    for tx in extra {
        reopened.append(tx).unwrap();
    }
    let again = Ledger::open(&path).unwrap();
    assert_eq!(again.states(), reopened.states());
    assert!(again.verify());
}

#[test]
fn next_request_id_follows_max() {
    let mut ledger = Ledger::new();
    assert_eq!(ledger.next_request_id(), 1);
    let mut chain = testkit::mini_chain();
    chain.header.request_id = 41;
    ledger.append(Transaction::create_request(&chain.header, "a", 1)).unwrap();
    assert_eq!(ledger.next_request_id(), 42);
}

fn phase_rank(phase: Phase) -> u8 {
    match phase {
        Phase::Open => 0,
        Phase::Sealed => 1,
        Phase::Computed => 2,
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn replay_matches_live_state(seed in any::<u64>(), requests in 1u64..4) {
        let txs = testkit::random_transactions(&mut testkit::rng(seed), requests);
        let mut ledger = Ledger::new();
        for tx in txs {
            let before_hash = ledger.state_hash();
            let before = ledger.state(tx.request_id).map(|s| phase_rank(s.phase));
            let before_len = ledger.len();
            match ledger.append(tx.clone()) {
                Ok(block) => {
                    prop_assert_eq!(block.sequence as usize, before_len);
                    prop_assert_ne!(ledger.state_hash(), before_hash);
                    let after = phase_rank(ledger.state(tx.request_id).unwrap().phase);
                    prop_assert!(before.is_none_or(|b| b <= after));
                }
                Err(_) => {
                    prop_assert_eq!(ledger.len(), before_len);
                    prop_assert_eq!(ledger.state_hash(), before_hash);
                }
            }
        }
        prop_assert!(ledger.verify());
        for (idx, entry) in ledger.entries().iter().enumerate() {
            prop_assert_eq!(entry.block.sequence, idx as u64);
        }
        let replayed = replay(ledger.entries()).unwrap();
        prop_assert_eq!(&replayed, ledger.states());
        prop_assert_eq!(state_hash(&replayed), ledger.state_hash());
        for state in replayed.values() {
            prop_assert_eq!(state.result.is_some(), state.phase == Phase::Computed);
        }

        let bytes = log_bytes(&ledger);
        let decoded = decode_log(&bytes).unwrap();
        prop_assert_eq!(Ledger::from_entries(decoded).unwrap().state_hash(), ledger.state_hash());
    }

    #[test]
    fn same_sequence_same_hash(seed in any::<u64>()) {
        let txs = testkit::random_transactions(&mut testkit::rng(seed), 2);
        prop_assert_eq!(built(&txs).state_hash(), built(&txs).state_hash());
        prop_assert_eq!(built(&txs).head_hash(), built(&txs).head_hash());
    }
}
