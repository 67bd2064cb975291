//! Append-only, hash-chained transaction ledger.
//!
//! Each block records one transaction. `blockHash = SHA-256(prevHash ||
//! txHash)` where `txHash` is the SHA-256 of the transaction's canonical
//! JSON; block 0 links to 32 zero bytes. Folding the transactions over an
//! empty world state reproduces the live state exactly.

mod log;
mod state;
mod transaction;

use std::path::Path;

use serde_json::{json, Value};

pub use log::{decode_log, encode_record, read_log, LogWriter};
pub use state::{state_hash, state_value, Phase, RequestState, WorldState};
pub use transaction::{Transaction, TxKind};

use crate::canonical::Digest;
use crate::engine::EngineError;
use crate::model::{DescriptorError, GroupId, ValidationReport};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum LedgerError {
    #[error("unknown request {0}")]
    UnknownRequest(u64),
    #[error("{kind} is not allowed on request {request_id} in phase {phase}")]
    IllegalTransition { request_id: u64, phase: Phase, kind: TxKind },
    #[error("request does not validate ({} violation(s))", .0.violations.len())]
    ValidationFailed(ValidationReport),
    #[error("invalid payload: {0}")]
    Payload(DescriptorError),
    #[error("request {request_id} has no resource group {group}")]
    UnknownResourceGroup { request_id: u64, group: GroupId },
    #[error("sharing failed: {0}")]
    Engine(EngineError),
    #[error("actorId must not be empty")]
    InvalidActor,
    #[error("corrupt log: {0}")]
    CorruptLog(String),
    #[error("i/o error: {0}")]
    Io(String),
}

impl LedgerError {
    pub fn code(&self) -> &'static str {
        match self {
            LedgerError::UnknownRequest(_) => "UNKNOWN_REQUEST",
            LedgerError::IllegalTransition { .. } => "ILLEGAL_TRANSITION",
            LedgerError::ValidationFailed(_) => "VALIDATION_FAILED",
            LedgerError::Payload(e) => e.code(),
            LedgerError::UnknownResourceGroup { .. } => "UNKNOWN_RESOURCE_GROUP",
            LedgerError::Engine(e) => e.code(),
            LedgerError::InvalidActor => "INVALID_ACTOR",
            LedgerError::CorruptLog(_) => "CORRUPT_LOG",
            LedgerError::Io(_) => "IO_ERROR",
        }
    }
}

impl From<std::io::Error> for LedgerError {
    fn from(e: std::io::Error) -> Self {
        LedgerError::Io(e.to_string())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct LedgerBlock {
    pub sequence: u64,
    pub prev_hash: Digest,
    pub tx_hash: Digest,
    pub block_hash: Digest,
}

impl LedgerBlock {
    pub fn link(sequence: u64, prev_hash: Digest, tx_hash: Digest) -> Self {
        LedgerBlock {
            sequence,
            prev_hash,
            tx_hash,
            block_hash: Digest::of_parts(&[prev_hash.as_bytes(), tx_hash.as_bytes()]),
        }
    }

    pub fn to_json(&self) -> Value {
        json!({
            "sequence": self.sequence,
            "prevHash": self.prev_hash.to_hex(),
            "txHash": self.tx_hash.to_hex(),
            "blockHash": self.block_hash.to_hex(),
        })
    }

    pub fn from_json(value: &Value) -> Result<Self, String> {
        let obj = value.as_object().ok_or("block header is not an object")?;
        let digest = |key: &str| {
            obj.get(key)
                .and_then(Value::as_str)
                .and_then(Digest::from_hex)
                .ok_or_else(|| format!("bad {key}"))
        };
        Ok(LedgerBlock {
            sequence: obj.get("sequence").and_then(Value::as_u64).ok_or("bad sequence")?,
            prev_hash: digest("prevHash")?,
            tx_hash: digest("txHash")?,
            block_hash: digest("blockHash")?,
        })
    }
}

/// A block with the transaction it commits to.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LedgerEntry {
    pub block: LedgerBlock,
    pub transaction: Transaction,
}

impl LedgerEntry {
    pub fn to_json(&self) -> Value {
        json!({"block": self.block.to_json(), "transaction": self.transaction.to_json()})
    }

    pub fn from_json(value: &Value) -> Result<Self, String> {
        let obj = value.as_object().ok_or("record is not an object")?;
        Ok(LedgerEntry {
            block: LedgerBlock::from_json(obj.get("block").ok_or("missing block")?)?,
            transaction: Transaction::from_json(obj.get("transaction").ok_or("missing transaction")?)?,
        })
    }
}

fn integrity_error(entries: &[LedgerEntry]) -> Option<String> {
    let mut prev = Digest::ZERO;
    for (idx, entry) in entries.iter().enumerate() {
        let block = &entry.block;
        if block.sequence != idx as u64 {
            return Some(format!("block {idx} has sequence {}", block.sequence));
        }
        if block.prev_hash != prev {
            return Some(format!("block {idx} does not link to its predecessor"));
        }
        if block.tx_hash != entry.transaction.digest() {
            return Some(format!("block {idx} transaction hash mismatch"));
        }
        if block.block_hash != LedgerBlock::link(block.sequence, prev, block.tx_hash).block_hash {
            return Some(format!("block {idx} hash mismatch"));
        }
        prev = block.block_hash;
    }
    None
}

/// True iff every block links to its predecessor, commits to its
/// transaction, and sequences run 0..n-1.
pub fn verify_integrity(entries: &[LedgerEntry]) -> bool {
    integrity_error(entries).is_none()
}

/// Rebuilds the world state from a log.
pub fn replay(entries: &[LedgerEntry]) -> Result<WorldState, LedgerError> {
    if let Some(reason) = integrity_error(entries) {
        return Err(LedgerError::CorruptLog(reason));
    }
    let mut states = WorldState::new();
    for (idx, entry) in entries.iter().enumerate() {
        let tx = &entry.transaction;
        let applied = state::transition(&states, tx)
            .map_err(|e| LedgerError::CorruptLog(format!("block {idx} is not a legal transition: {e}")))?;
        if applied.payload != tx.payload {
            return Err(LedgerError::CorruptLog(format!("block {idx} payload is not canonical")));
        }
        states.insert(tx.request_id, applied.state);
    }
    Ok(states)
}

/// In-memory ledger, optionally mirrored to an append-only log file.
///
/// `append` takes `&mut self`: callers that share a ledger must serialize
/// writers (for instance behind a lock); readers only see fully applied
/// transactions.
#[derive(Debug, Default)]
pub struct Ledger {
    entries: Vec<LedgerEntry>,
    states: WorldState,
    log: Option<LogWriter>,
}

impl Ledger {
    pub fn new() -> Self {
        Self::default()
    }

    /// Rebuilds a ledger from existing entries.
    pub fn from_entries(entries: Vec<LedgerEntry>) -> Result<Self, LedgerError> {
        let states = replay(&entries)?;
        Ok(Ledger { entries, states, log: None })
    }

    /// Opens (or creates) a log file, replays it and mirrors future appends
    /// into it.
    pub fn open(path: impl AsRef<Path>) -> Result<Self, LedgerError> {
        let path = path.as_ref();
        let entries = if path.exists() { read_log(path)? } else { Vec::new() };
        let mut ledger = Self::from_entries(entries)?;
        ledger.log = Some(LogWriter::open(path)?);
        Ok(ledger)
    }

    /// Validates `tx` against the current state, appends a block and applies
    /// the transition. On error nothing changes.
    pub fn append(&mut self, tx: Transaction) -> Result<LedgerBlock, LedgerError> {
        let applied = state::transition(&self.states, &tx)?;
        let tx = Transaction { payload: applied.payload, ..tx };
        let block = LedgerBlock::link(self.entries.len() as u64, self.head_hash(), tx.digest());
        let entry = LedgerEntry { block, transaction: tx };
        if let Some(log) = self.log.as_mut() {
            log.append(&entry)?;
        }
        self.states.insert(entry.transaction.request_id, applied.state);
        self.entries.push(entry);
        Ok(block)
    }

    pub fn entries(&self) -> &[LedgerEntry] {
        &self.entries
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn states(&self) -> &WorldState {
        &self.states
    }

    pub fn state(&self, request_id: u64) -> Option<&RequestState> {
        self.states.get(&request_id)
    }

    /// Hash of the last block, or zero for an empty ledger.
    pub fn head_hash(&self) -> Digest {
        self.entries.last().map(|e| e.block.block_hash).unwrap_or(Digest::ZERO)
    }

    pub fn state_hash(&self) -> Digest {
        state_hash(&self.states)
    }

    pub fn verify(&self) -> bool {
        verify_integrity(&self.entries)
    }

    /// Smallest request id above every id in use.
    pub fn next_request_id(&self) -> u64 {
        self.states.keys().next_back().map_or(1, |id| id + 1)
    }
}
