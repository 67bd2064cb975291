//! HTTP/JSON facade over the consortium ledger.
//!
//! Every mutating route appends exactly one transaction; reads never touch
//! the log. All bodies are canonical JSON.

pub mod auth;
pub mod config;
pub mod error;

use std::sync::{Arc, RwLock};
use std::time::{SystemTime, UNIX_EPOCH};

use axum::body::Bytes;
use axum::extract::{Path, State};
use axum::http::{header, HeaderMap, HeaderValue, StatusCode};
use axum::response::{IntoResponse, Response};
use axum::routing::{get, post};
use axum::Router;
use consortium_core::canonical::to_canonical_string;
use consortium_core::ledger::state_value;
use consortium_core::model::DescriptorError;
use consortium_core::{Ledger, Phase, Transaction, TxKind};
use serde_json::{json, Map, Value};

pub use auth::{Authenticator, OpenAccess, TokenTable};
pub use config::ServiceConfig;
pub use error::ApiError;

pub type Clock = Arc<dyn Fn() -> u64 + Send + Sync>;

#[derive(Clone)]
pub struct AppState {
    ledger: Arc<RwLock<Ledger>>,
    auth: Arc<dyn Authenticator>,
    clock: Clock,
}

fn system_millis() -> u64 {
    SystemTime::now().duration_since(UNIX_EPOCH).map_or(0, |d| d.as_millis() as u64)
}

impl AppState {
    pub fn new(ledger: Ledger, auth: impl Authenticator + 'static) -> Self {
        AppState {
            ledger: Arc::new(RwLock::new(ledger)),
            auth: Arc::new(auth),
            clock: Arc::new(system_millis),
        }
    }

    /// Replaces the wall clock used to stamp transactions.
    pub fn with_clock(mut self, clock: impl Fn() -> u64 + Send + Sync + 'static) -> Self {
        self.clock = Arc::new(clock);
        self
    }

    pub fn ledger(&self) -> Arc<RwLock<Ledger>> {
        Arc::clone(&self.ledger)
    }
}

pub fn canonical_response(status: StatusCode, body: &Value) -> Response {
    let mut response = (status, to_canonical_string(body)).into_response();
    response
        .headers_mut()
        .insert(header::CONTENT_TYPE, HeaderValue::from_static("application/json"));
    response
}

pub fn router(state: AppState) -> Router {
    Router::new()
        .route("/requests", post(create_request))
        .route("/requests/{id}", get(get_request))
        .route("/requests/{id}/result", get(get_result))
        .route("/requests/{id}/options", post(set_options))
        .route("/requests/{id}/levels/{i}/resources/{k}", post(add_resource_group))
        .route("/requests/{id}/levels/{i}/resources/{k}/supplies", post(add_supply))
        .route("/requests/{id}/services/financial", post(add_financial_service))
        .route("/requests/{id}/services/it", post(add_it_service))
        .route("/requests/{id}/seal", post(seal))
        .route("/requests/{id}/run", post(run))
        .route("/ledger/integrity", get(integrity))
        .route("/ledger/state", get(world_state))
        .fallback(|| async { ApiError::not_found("no such route") })
        .method_not_allowed_fallback(|| async {
            ApiError::new(StatusCode::METHOD_NOT_ALLOWED, "BAD_REQUEST", "method not allowed")
        })
        .with_state(state)
}

fn actor(state: &AppState, headers: &HeaderMap) -> Result<String, ApiError> {
    let token = headers
        .get(header::AUTHORIZATION)
        .and_then(|v| v.to_str().ok())
        .and_then(|v| v.strip_prefix("Bearer "))
        .map(str::trim);
    state.auth.actor(token).ok_or_else(ApiError::unauthorized)
}

fn parse_id(raw: &str, name: &str) -> Result<u64, ApiError> {
    raw.parse()
        .map_err(|_| ApiError::bad_request(format!("path parameter {name} must be a non-negative integer")))
}

fn parse_index(raw: &str, name: &str) -> Result<u32, ApiError> {
    raw.parse()
        .map_err(|_| ApiError::bad_request(format!("path parameter {name} must be a non-negative integer")))
}

fn body_object(body: &Bytes) -> Result<Map<String, Value>, ApiError> {
    if body.iter().all(u8::is_ascii_whitespace) {
        return Ok(Map::new());
    }
    let value: Value = serde_json::from_slice(body)
        .map_err(|e| ApiError::from(DescriptorError::MalformedDocument(e.to_string())))?;
    match value {
        Value::Object(map) => Ok(map),
        _ => Err(DescriptorError::SchemaViolation { path: "$".into(), expected: "object".into() }.into()),
    }
}

/// Copies a path parameter into the payload, refusing a body that names a
/// different value.
fn bind(payload: &mut Map<String, Value>, key: &str, value: u32) -> Result<(), ApiError> {
    if let Some(existing) = payload.get(key) {
        if existing.as_u64() != Some(value.into()) {
            return Err(DescriptorError::SchemaViolation {
                path: format!("$.{key}"),
                expected: format!("{value} (as in the URL) or absent"),
            }
            .into());
        }
    }
    payload.insert(key.into(), json!(value));
    Ok(())
}

fn created(request_id: u64, block: consortium_core::LedgerBlock) -> Response {
    canonical_response(
        StatusCode::CREATED,
        &json!({
            "sequence": block.sequence,
            "blockHash": block.block_hash.to_hex(),
            "requestId": request_id,
        }),
    )
}

fn submit(
    state: &AppState,
    headers: &HeaderMap,
    kind: TxKind,
    request_id: u64,
    payload: Map<String, Value>,
) -> Result<Response, ApiError> {
    let actor = actor(state, headers)?;
    let tx = Transaction::new(kind, request_id, actor, Value::Object(payload), (state.clock)());
    let mut ledger = state.ledger.write().expect("ledger lock poisoned");
    let block = ledger.append(tx)?;
    tracing::info!(kind = %kind, request_id, sequence = block.sequence, "appended");
    Ok(created(request_id, block))
}

async fn create_request(
    State(state): State<AppState>,
    headers: HeaderMap,
    body: Bytes,
) -> Result<Response, ApiError> {
    let actor = actor(&state, &headers)?;
    let payload = body_object(&body)?;
    let mut ledger = state.ledger.write().expect("ledger lock poisoned");
    let request_id = match payload.get("requestId") {
        None => ledger.next_request_id(),
        Some(v) => v.as_u64().filter(|id| *id > 0).ok_or_else(|| {
            ApiError::from(DescriptorError::SchemaViolation {
                path: "$.requestId".into(),
                expected: "positive integer".into(),
            })
        })?,
    };
    let tx = Transaction::new(
        TxKind::CreateRequest,
        request_id,
        actor,
        Value::Object(payload),
        (state.clock)(),
    );
    let block = ledger.append(tx)?;
    tracing::info!(request_id, sequence = block.sequence, "request created");
    Ok(created(request_id, block))
}

async fn set_options(
    State(state): State<AppState>,
    Path(id): Path<String>,
    headers: HeaderMap,
    body: Bytes,
) -> Result<Response, ApiError> {
    let id = parse_id(&id, "id")?;
    submit(&state, &headers, TxKind::SetSharingOptions, id, body_object(&body)?)
}

async fn add_resource_group(
    State(state): State<AppState>,
    Path((id, i, k)): Path<(String, String, String)>,
    headers: HeaderMap,
    body: Bytes,
) -> Result<Response, ApiError> {
    let id = parse_id(&id, "id")?;
    let mut payload = body_object(&body)?;
    bind(&mut payload, "i", parse_index(&i, "i")?)?;
    bind(&mut payload, "k", parse_index(&k, "k")?)?;
    submit(&state, &headers, TxKind::AddResourceGroup, id, payload)
}

async fn add_supply(
    State(state): State<AppState>,
    Path((id, i, k)): Path<(String, String, String)>,
    headers: HeaderMap,
    body: Bytes,
) -> Result<Response, ApiError> {
    let id = parse_id(&id, "id")?;
    let mut payload = body_object(&body)?;
    bind(&mut payload, "i", parse_index(&i, "i")?)?;
    bind(&mut payload, "k", parse_index(&k, "k")?)?;
    submit(&state, &headers, TxKind::AddSupply, id, payload)
}

async fn add_financial_service(
    State(state): State<AppState>,
    Path(id): Path<String>,
    headers: HeaderMap,
    body: Bytes,
) -> Result<Response, ApiError> {
    let id = parse_id(&id, "id")?;
    submit(&state, &headers, TxKind::AddFinancialService, id, body_object(&body)?)
}

async fn add_it_service(
    State(state): State<AppState>,
    Path(id): Path<String>,
    headers: HeaderMap,
    body: Bytes,
) -> Result<Response, ApiError> {
    let id = parse_id(&id, "id")?;
    submit(&state, &headers, TxKind::AddItService, id, body_object(&body)?)
}

async fn seal(
    State(state): State<AppState>,
    Path(id): Path<String>,
    headers: HeaderMap,
    body: Bytes,
) -> Result<Response, ApiError> {
    let id = parse_id(&id, "id")?;
    submit(&state, &headers, TxKind::SealRequest, id, body_object(&body)?)
}

async fn run(
    State(state): State<AppState>,
    Path(id): Path<String>,
    headers: HeaderMap,
    body: Bytes,
) -> Result<Response, ApiError> {
    let id = parse_id(&id, "id")?;
    submit(&state, &headers, TxKind::RunSharing, id, body_object(&body)?)
}

async fn get_request(State(state): State<AppState>, Path(id): Path<String>) -> Result<Response, ApiError> {
    let id = parse_id(&id, "id")?;
    let ledger = state.ledger.read().expect("ledger lock poisoned");
    let request = ledger.state(id).ok_or_else(|| ApiError::not_found(format!("unknown request {id}")))?;
    Ok(canonical_response(StatusCode::OK, &request.to_json()))
}

async fn get_result(State(state): State<AppState>, Path(id): Path<String>) -> Result<Response, ApiError> {
    let id = parse_id(&id, "id")?;
    let ledger = state.ledger.read().expect("ledger lock poisoned");
    let request = ledger.state(id).ok_or_else(|| ApiError::not_found(format!("unknown request {id}")))?;
    match (&request.result, request.phase) {
        (Some(result), Phase::Computed) => Ok(canonical_response(StatusCode::OK, &result.to_json())),
        _ => Err(ApiError::conflict(format!("request {id} is {}, not COMPUTED", request.phase))),
    }
}

async fn integrity(State(state): State<AppState>) -> Response {
    let ledger = state.ledger.read().expect("ledger lock poisoned");
    canonical_response(
        StatusCode::OK,
        &json!({
            "valid": ledger.verify(),
            "blocks": ledger.len(),
            "headHash": ledger.head_hash().to_hex(),
            "stateHash": ledger.state_hash().to_hex(),
        }),
    )
}

async fn world_state(State(state): State<AppState>) -> Response {
    let ledger = state.ledger.read().expect("ledger lock poisoned");
    canonical_response(StatusCode::OK, &state_value(ledger.states()))
}

/// The ordered `POST` calls (route, body) that build `chain` through the API,
/// ending with seal and run.
pub fn build_calls(chain: &consortium_core::SupplyChain) -> Vec<(String, Value)> {
    use consortium_core::model::{
        encode_financial_service, encode_header, encode_it_service, encode_options,
        encode_resource_group, encode_supply,
    };
    let id = chain.header.request_id;
    let mut header = encode_header(&chain.header);
    header.insert("requestId".into(), json!(id));
    let mut calls = vec![
        ("/requests".to_string(), Value::Object(header)),
        (format!("/requests/{id}/options"), Value::Object(encode_options(&chain.options))),
    ];
    for level in &chain.levels {
        for group in &level.resources {
            let base = format!("/requests/{id}/levels/{}/resources/{}", level.index, group.resource_index);
            calls.push((base.clone(), Value::Object(encode_resource_group(group))));
            for supply in &group.supplies {
                calls.push((format!("{base}/supplies"), Value::Object(encode_supply(supply))));
            }
        }
    }
    for service in &chain.services.financial {
        calls.push((
            format!("/requests/{id}/services/financial"),
            Value::Object(encode_financial_service(service)),
        ));
    }
    for service in &chain.services.it {
        calls.push((format!("/requests/{id}/services/it"), Value::Object(encode_it_service(service))));
    }
    calls.push((format!("/requests/{id}/seal"), json!({})));
    calls.push((format!("/requests/{id}/run"), json!({})));
    calls
}
