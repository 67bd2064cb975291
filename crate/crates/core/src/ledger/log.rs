//! On-disk log: a sequence of records, each a 4-byte big-endian length
//! followed by the canonical JSON of `{"block": .., "transaction": ..}`.

use std::fs::{File, OpenOptions};
use std::io::Write;
use std::path::Path;

use super::{LedgerEntry, LedgerError};
use crate::canonical::to_canonical_bytes;

pub fn encode_record(entry: &LedgerEntry) -> Vec<u8> {
    let body = to_canonical_bytes(&entry.to_json());
    let mut out = Vec::with_capacity(body.len() + 4);
    out.extend_from_slice(&(body.len() as u32).to_be_bytes());
    out.extend_from_slice(&body);
    out
}

/// Decodes a whole log. Every record must be exactly the canonical encoding
/// of the entry it decodes to; hashes are not checked here.
pub fn decode_log(bytes: &[u8]) -> Result<Vec<LedgerEntry>, LedgerError> {
    let mut entries = Vec::new();
    let mut rest = bytes;
    while !rest.is_empty() {
        let idx = entries.len();
        let corrupt = |why: &str| LedgerError::CorruptLog(format!("record {idx}: {why}"));
        if rest.len() < 4 {
            return Err(corrupt("truncated length prefix"));
        }
        let len = u32::from_be_bytes(rest[..4].try_into().expect("4 bytes")) as usize;
        let body = rest.get(4..4 + len).ok_or_else(|| corrupt("truncated record"))?;
        let value: serde_json::Value =
            serde_json::from_slice(body).map_err(|e| corrupt(&e.to_string()))?;
        let entry = LedgerEntry::from_json(&value).map_err(|e| corrupt(&e))?;
        if to_canonical_bytes(&entry.to_json()) != body {
            return Err(corrupt("record is not in canonical form"));
        }
        entries.push(entry);
        rest = &rest[4 + len..];
    }
    Ok(entries)
}

pub fn read_log(path: impl AsRef<Path>) -> Result<Vec<LedgerEntry>, LedgerError> {
    let bytes = std::fs::read(path)?;
    decode_log(&bytes)
}

/// Append-only writer for the log file.
#[derive(Debug)]
pub struct LogWriter {
    file: File,
}

impl LogWriter {
    pub fn open(path: impl AsRef<Path>) -> Result<Self, LedgerError> {
        let file = OpenOptions::new().create(true).append(true).open(path)?;
        Ok(LogWriter { file })
    }

    pub fn append(&mut self, entry: &LedgerEntry) -> Result<(), LedgerError> {
        self.file.write_all(&encode_record(entry))?;
        self.file.sync_data()?;
        Ok(())
    }
}
