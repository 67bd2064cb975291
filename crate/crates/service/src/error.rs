use axum::http::StatusCode;
use axum::response::{IntoResponse, Response};
use consortium_core::ledger::LedgerError;
use consortium_core::model::DescriptorError;
use serde_json::{json, Value};

use crate::canonical_response;

/// Error body returned by every failing endpoint.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ApiError {
    pub status: StatusCode,
    pub code: String,
    pub detail: String,
    pub path: Option<String>,
}

impl ApiError {
    pub fn new(status: StatusCode, code: &str, detail: impl Into<String>) -> Self {
        ApiError { status, code: code.to_string(), detail: detail.into(), path: None }
    }

    pub fn with_path(mut self, path: impl Into<String>) -> Self {
        self.path = Some(path.into());
        self
    }

    pub fn not_found(detail: impl Into<String>) -> Self {
        Self::new(StatusCode::NOT_FOUND, "NOT_FOUND", detail)
    }

    pub fn conflict(detail: impl Into<String>) -> Self {
        Self::new(StatusCode::CONFLICT, "CONFLICT", detail)
    }

    pub fn bad_request(detail: impl Into<String>) -> Self {
        Self::new(StatusCode::BAD_REQUEST, "BAD_REQUEST", detail)
    }

    pub fn unauthorized() -> Self {
        Self::new(StatusCode::UNAUTHORIZED, "UNAUTHORIZED", "missing or unknown bearer token")
    }

    pub fn to_json(&self) -> Value {
        json!({
            "httpStatus": self.status.as_u16(),
            "code": self.code,
            "detail": self.detail,
            "path": self.path,
        })
    }
}

/// Payload paths are reported relative to the request body.
fn body_path(path: &str) -> String {
    match path.strip_prefix("$.payload") {
        Some(rest) => format!("${rest}"),
        None => path.to_string(),
    }
}

impl From<DescriptorError> for ApiError {
    fn from(e: DescriptorError) -> Self {
        let err = ApiError::new(StatusCode::BAD_REQUEST, e.code(), e.to_string());
        match e.path() {
            Some(path) => err.with_path(body_path(path)),
            None => err,
        }
    }
}

impl From<LedgerError> for ApiError {
    fn from(e: LedgerError) -> Self {
        let detail = e.to_string();
        match e {
            LedgerError::Payload(inner) => inner.into(),
            LedgerError::UnknownRequest(_) | LedgerError::UnknownResourceGroup { .. } => {
                ApiError::new(StatusCode::NOT_FOUND, e.code(), detail)
            }
            LedgerError::IllegalTransition { .. } => ApiError::new(StatusCode::CONFLICT, e.code(), detail),
            LedgerError::ValidationFailed(ref report) => {
                let messages: Vec<String> = report
                    .violations
                    .iter()
                    .map(|d| format!("{} at {}: {}", d.code.as_str(), d.path, d.message))
                    .collect();
                let err = ApiError::new(StatusCode::UNPROCESSABLE_ENTITY, e.code(), messages.join("; "));
                match report.violations.first() {
                    Some(first) => err.with_path(first.path.clone()),
                    None => err,
                }
            }
            LedgerError::Engine(ref inner) => {
                ApiError::new(StatusCode::UNPROCESSABLE_ENTITY, inner.code(), detail)
            }
            LedgerError::InvalidActor => ApiError::new(StatusCode::BAD_REQUEST, e.code(), detail),
            LedgerError::CorruptLog(_) | LedgerError::Io(_) => {
                ApiError::new(StatusCode::INTERNAL_SERVER_ERROR, e.code(), detail)
            }
        }
    }
}

impl IntoResponse for ApiError {
    fn into_response(self) -> Response {
        canonical_response(self.status, &self.to_json())
    }
}
