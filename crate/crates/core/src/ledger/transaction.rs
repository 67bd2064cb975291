use std::fmt;

use serde_json::{json, Map, Value};

use crate::canonical::{to_canonical_bytes, Digest};
use crate::model::{
    encode_financial_service, encode_header, encode_it_service, encode_options,
    encode_resource_group, encode_supply, FinancialService, GroupId, ItService, RequestHeader,
    ResourceGroup, SharingOptions, Supply,
};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum TxKind {
    CreateRequest,
    AddResourceGroup,
    AddSupply,
    AddFinancialService,
    AddItService,
    SetSharingOptions,
    SealRequest,
    RunSharing,
}

impl TxKind {
    pub const ALL: [TxKind; 8] = [
        TxKind::CreateRequest,
        TxKind::AddResourceGroup,
        TxKind::AddSupply,
        TxKind::AddFinancialService,
        TxKind::AddItService,
        TxKind::SetSharingOptions,
        TxKind::SealRequest,
        TxKind::RunSharing,
    ];

    pub fn code(self) -> &'static str {
        match self {
            TxKind::CreateRequest => "CREATE_REQUEST",
            TxKind::AddResourceGroup => "ADD_RESOURCE_GROUP",
            TxKind::AddSupply => "ADD_SUPPLY",
            TxKind::AddFinancialService => "ADD_FINANCIAL_SERVICE",
            TxKind::AddItService => "ADD_IT_SERVICE",
            TxKind::SetSharingOptions => "SET_SHARING_OPTIONS",
            TxKind::SealRequest => "SEAL_REQUEST",
            TxKind::RunSharing => "RUN_SHARING",
        }
    }

    pub fn from_code(code: &str) -> Option<Self> {
        TxKind::ALL.into_iter().find(|k| k.code() == code)
    }
}

impl fmt::Display for TxKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.code())
    }
}

/// One state mutation. `timestamp` is caller-supplied milliseconds and
/// only informational: it is hashed into the block but never into state.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Transaction {
    pub kind: TxKind,
    pub request_id: u64,
    pub actor_id: String,
    pub payload: Value,
    pub timestamp: u64,
}

impl Transaction {
    pub fn new(
        kind: TxKind,
        request_id: u64,
        actor_id: impl Into<String>,
        payload: Value,
        timestamp: u64,
    ) -> Self {
        Transaction { kind, request_id, actor_id: actor_id.into(), payload, timestamp }
    }

    pub fn create_request(header: &RequestHeader, actor: &str, timestamp: u64) -> Self {
        Self::new(
            TxKind::CreateRequest,
            header.request_id,
            actor,
            Value::Object(encode_header(header)),
            timestamp,
        )
    }

    /// Adds a group without its supplies.
    pub fn add_resource_group(
        request_id: u64,
        level: u32,
        group: &ResourceGroup,
        actor: &str,
        timestamp: u64,
    ) -> Self {
        let mut payload = encode_resource_group(group);
        payload.insert("i".into(), json!(level));
        Self::new(TxKind::AddResourceGroup, request_id, actor, Value::Object(payload), timestamp)
    }

    pub fn add_supply(
        request_id: u64,
        group: GroupId,
        supply: &Supply,
        actor: &str,
        timestamp: u64,
    ) -> Self {
        let mut payload = encode_supply(supply);
        payload.insert("i".into(), json!(group.level));
        payload.insert("k".into(), json!(group.resource));
        Self::new(TxKind::AddSupply, request_id, actor, Value::Object(payload), timestamp)
    }

    pub fn add_financial_service(
        request_id: u64,
        service: &FinancialService,
        actor: &str,
        timestamp: u64,
    ) -> Self {
        Self::new(
            TxKind::AddFinancialService,
            request_id,
            actor,
            Value::Object(encode_financial_service(service)),
            timestamp,
        )
    }

    pub fn add_it_service(request_id: u64, service: &ItService, actor: &str, timestamp: u64) -> Self {
        Self::new(
            TxKind::AddItService,
            request_id,
            actor,
            Value::Object(encode_it_service(service)),
            timestamp,
        )
    }

    pub fn set_sharing_options(
        request_id: u64,
        options: &SharingOptions,
        actor: &str,
        timestamp: u64,
    ) -> Self {
        Self::new(
            TxKind::SetSharingOptions,
            request_id,
            actor,
            Value::Object(encode_options(options)),
            timestamp,
        )
    }

    pub fn seal(request_id: u64, actor: &str, timestamp: u64) -> Self {
        Self::new(TxKind::SealRequest, request_id, actor, Value::Object(Map::new()), timestamp)
    }

    pub fn run(request_id: u64, actor: &str, timestamp: u64) -> Self {
        Self::new(TxKind::RunSharing, request_id, actor, Value::Object(Map::new()), timestamp)
    }

    pub fn to_json(&self) -> Value {
        json!({
            "kind": self.kind.code(),
            "requestId": self.request_id,
            "actorId": self.actor_id,
            "payload": self.payload,
            "timestamp": self.timestamp,
        })
    }

    pub fn from_json(value: &Value) -> Result<Self, String> {
        let obj = value.as_object().ok_or("transaction is not an object")?;
        let kind = obj
            .get("kind")
            .and_then(Value::as_str)
            .and_then(TxKind::from_code)
            .ok_or("missing or unknown transaction kind")?;
        let request_id = obj.get("requestId").and_then(Value::as_u64).ok_or("missing requestId")?;
        let actor_id = obj.get("actorId").and_then(Value::as_str).ok_or("missing actorId")?;
        let payload = obj.get("payload").filter(|p| p.is_object()).ok_or("missing payload")?;
        let timestamp = obj.get("timestamp").and_then(Value::as_u64).ok_or("missing timestamp")?;
        Ok(Transaction::new(kind, request_id, actor_id, payload.clone(), timestamp))
    }

    pub fn canonical_bytes(&self) -> Vec<u8> {
        to_canonical_bytes(&self.to_json())
    }

    pub fn digest(&self) -> Digest {
        Digest::of(&self.canonical_bytes())
    }
}
