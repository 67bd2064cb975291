//! Request world state and the transition rules.

use std::collections::BTreeMap;
use std::fmt;

use serde_json::{json, Map, Value};

use super::transaction::{Transaction, TxKind};
use super::LedgerError;
use crate::canonical::{to_canonical_bytes, Digest};
use crate::engine::{run_sharing, SharingResult};
use crate::model::{
    encode_financial_service, encode_header, encode_it_service, encode_options,
    encode_resource_group, encode_supply, parse_financial_service, parse_header,
    parse_it_service, parse_options, parse_resource_group_fields, parse_supply,
    serialize_chain_value, validate_chain, DescriptorError, GroupId, Level, NodeId, Reader,
    SupplyChain,
};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Phase {
    Open,
    Sealed,
    Computed,
}

impl Phase {
    pub fn code(self) -> &'static str {
        match self {
            Phase::Open => "OPEN",
            Phase::Sealed => "SEALED",
            Phase::Computed => "COMPUTED",
        }
    }
}

impl fmt::Display for Phase {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.code())
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RequestState {
    pub phase: Phase,
    /// Number of transactions applied to this request.
    pub revision: u64,
    pub chain: SupplyChain,
    /// Present exactly when `phase` is `Computed`.
    pub result: Option<SharingResult>,
}

impl RequestState {
    pub fn to_json(&self) -> Value {
        json!({
            "requestId": self.chain.header.request_id,
            "phase": self.phase.code(),
            "revision": self.revision,
            "descriptor": serialize_chain_value(&self.chain),
            "result": self.result.as_ref().map(SharingResult::to_json),
        })
    }
}

pub type WorldState = BTreeMap<u64, RequestState>;

/// Canonical serialization of the world state: an object mapping each
/// request id (as a decimal string) to its state.
pub fn state_value(states: &WorldState) -> Value {
    Value::Object(states.iter().map(|(id, s)| (id.to_string(), s.to_json())).collect())
}

pub fn state_hash(states: &WorldState) -> Digest {
    Digest::of(&to_canonical_bytes(&state_value(states)))
}

/// Outcome of a legal transition: the updated request state and the
/// canonical payload to record.
pub(crate) struct Transition {
    pub state: RequestState,
    pub payload: Value,
}

fn payload_reader(tx: &Transaction) -> Result<Reader<'_>, LedgerError> {
    Reader::new(&tx.payload, "$.payload").map_err(LedgerError::Payload)
}

fn current<'a>(states: &'a WorldState, tx: &Transaction) -> Result<&'a RequestState, LedgerError> {
    states.get(&tx.request_id).ok_or(LedgerError::UnknownRequest(tx.request_id))
}

fn require_phase(state: &RequestState, tx: &Transaction, phase: Phase) -> Result<(), LedgerError> {
    if state.phase == phase {
        Ok(())
    } else {
        Err(LedgerError::IllegalTransition {
            request_id: tx.request_id,
            phase: state.phase,
            kind: tx.kind,
        })
    }
}

fn duplicate(path: &str, key: String) -> LedgerError {
    LedgerError::Payload(DescriptorError::DuplicateKey { path: path.to_string(), key })
}

/// Checks `tx` against the current state and computes its effect without
/// mutating anything.
pub(crate) fn transition(states: &WorldState, tx: &Transaction) -> Result<Transition, LedgerError> {
    if tx.actor_id.is_empty() {
        return Err(LedgerError::InvalidActor);
    }
    let reader = payload_reader(tx)?;

    if tx.kind == TxKind::CreateRequest {
        if let Some(existing) = states.get(&tx.request_id) {
            return Err(LedgerError::IllegalTransition {
                request_id: tx.request_id,
                phase: existing.phase,
                kind: tx.kind,
            });
        }
        if tx.request_id == 0 {
            return Err(LedgerError::Payload(DescriptorError::SchemaViolation {
                path: "$.requestId".into(),
                expected: "positive integer".into(),
            }));
        }
        if reader.contains("requestId") && reader.u64("requestId").ok() != Some(tx.request_id) {
            return Err(LedgerError::Payload(DescriptorError::SchemaViolation {
                path: reader.child_path("requestId"),
                expected: format!("{} (the transaction's request id)", tx.request_id),
            }));
        }
        let mut header = parse_header(&reader).map_err(LedgerError::Payload)?;
        header.request_id = tx.request_id;
        let payload = Value::Object(encode_header(&header));
        return Ok(Transition {
            state: RequestState {
                phase: Phase::Open,
                revision: 1,
                chain: SupplyChain::new(header),
                result: None,
            },
            payload,
        });
    }

    let state = current(states, tx)?;
    let mut next = state.clone();
    next.revision += 1;
    let payload = match tx.kind {
        TxKind::CreateRequest => unreachable!("handled above"),
        TxKind::AddResourceGroup => {
            require_phase(state, tx, Phase::Open)?;
            let level_index = reader.u32("i").map_err(LedgerError::Payload)?;
            let group = parse_resource_group_fields(&reader, 0).map_err(LedgerError::Payload)?;
            let mut payload = encode_resource_group(&group);
            payload.insert("i".into(), json!(level_index));

            let levels = &mut next.chain.levels;
            let pos = match levels.binary_search_by_key(&level_index, |l| l.index) {
                Ok(pos) => pos,
                Err(pos) => {
                    levels.insert(pos, Level { index: level_index, resources: Vec::new() });
                    pos
                }
            };
            let resources = &mut levels[pos].resources;
            match resources.binary_search_by_key(&group.resource_index, |g| g.resource_index) {
                Ok(_) => {
                    return Err(duplicate(
                        "$.payload.k",
                        GroupId::new(level_index, group.resource_index).to_string(),
                    ))
                }
                Err(at) => resources.insert(at, group),
            }
            Value::Object(payload)
        }
        TxKind::AddSupply => {
            require_phase(state, tx, Phase::Open)?;
            let gid = GroupId::new(
                reader.u32("i").map_err(LedgerError::Payload)?,
                reader.u32("k").map_err(LedgerError::Payload)?,
            );
            let supply = parse_supply(&reader).map_err(LedgerError::Payload)?;
            let mut payload = encode_supply(&supply);
            payload.insert("i".into(), json!(gid.level));
            payload.insert("k".into(), json!(gid.resource));

            let group = next
                .chain
                .levels
                .iter_mut()
                .find(|l| l.index == gid.level)
                .and_then(|l| l.resources.iter_mut().find(|g| g.resource_index == gid.resource))
                .ok_or(LedgerError::UnknownResourceGroup { request_id: tx.request_id, group: gid })?;
            match group.supplies.binary_search_by_key(&supply.supplier_index, |s| s.supplier_index) {
                Ok(_) => {
                    return Err(duplicate(
                        "$.payload.m",
                        NodeId::new(gid.level, gid.resource, supply.supplier_index).to_string(),
                    ))
                }
                Err(at) => group.supplies.insert(at, supply),
            }
            Value::Object(payload)
        }
        TxKind::AddFinancialService => {
            require_phase(state, tx, Phase::Open)?;
            let service = parse_financial_service(&reader).map_err(LedgerError::Payload)?;
            let payload = Value::Object(encode_financial_service(&service));
            next.chain.services.financial.push(service);
            payload
        }
        TxKind::AddItService => {
            require_phase(state, tx, Phase::Open)?;
            let service = parse_it_service(&reader).map_err(LedgerError::Payload)?;
            let payload = Value::Object(encode_it_service(&service));
            next.chain.services.it.push(service);
            payload
        }
        TxKind::SetSharingOptions => {
            require_phase(state, tx, Phase::Open)?;
            let options = parse_options(&reader).map_err(LedgerError::Payload)?;
            let payload = Value::Object(encode_options(&options));
            next.chain.options = options;
            payload
        }
        TxKind::SealRequest => {
            require_phase(state, tx, Phase::Open)?;
            let report = validate_chain(&next.chain);
            if !report.is_valid() {
                return Err(LedgerError::ValidationFailed(report));
            }
            next.phase = Phase::Sealed;
            Value::Object(Map::new())
        }
        TxKind::RunSharing => {
            require_phase(state, tx, Phase::Sealed)?;
            let result = run_sharing(&next.chain).map_err(LedgerError::Engine)?;
            next.result = Some(result);
            next.phase = Phase::Computed;
            Value::Object(Map::new())
        }
    };
    Ok(Transition { state: next, payload })
}
