use std::sync::atomic::{AtomicU64, Ordering};
use std::sync::Arc;

use axum::body::Body;
use axum::http::{header, Method, Request, StatusCode};
use axum::Router;
use consortium_core::canonical::to_canonical_string;
use consortium_core::model::parse_chain_value;
use consortium_core::{run_sharing, testkit, Ledger, Money, Phase};
use consortium_service::{build_calls, router, AppState, OpenAccess, TokenTable};
use http_body_util::BodyExt;
use serde_json::{json, Value};
use tower::ServiceExt;

struct Reply {
    status: StatusCode,
    raw: String,
    json: Value,
}

fn open_app() -> (Router, AppState) {
    let ticks = Arc::new(AtomicU64::new(1_000));
    let state = AppState::new(Ledger::new(), OpenAccess::default())
        .with_clock(move || ticks.fetch_add(1, Ordering::SeqCst));
    (router(state.clone()), state)
}

async fn call(app: &Router, method: Method, uri: &str, token: Option<&str>, body: Option<&Value>) -> Reply {
    let mut builder = Request::builder().method(method).uri(uri);
    if let Some(token) = token {
        builder = builder.header(header::AUTHORIZATION, format!("Bearer {token}"));
    }
    let body = match body {
        Some(v) => Body::from(v.to_string()),
        None => Body::empty(),
    };
    let response = app.clone().oneshot(builder.body(body).unwrap()).await.unwrap();
    let status = response.status();
    if status != StatusCode::CREATED && status != StatusCode::OK {
        assert_eq!(response.headers()[header::CONTENT_TYPE], "application/json");
    }
    let bytes = response.into_body().collect().await.unwrap().to_bytes();
    let raw = String::from_utf8(bytes.to_vec()).unwrap();
    let json = serde_json::from_str(&raw).unwrap_or(Value::Null);
    Reply { status, raw, json }
}

async fn post(app: &Router, uri: &str, body: Value) -> Reply {
    call(app, Method::POST, uri, None, Some(&body)).await
}

async fn get(app: &Router, uri: &str) -> Reply {
    call(app, Method::GET, uri, None, None).await
}

async fn build(app: &Router, chain: &consortium_core::SupplyChain, run: bool) {
    for (uri, body) in build_calls(chain) {
        if !run && uri.ends_with("/run") {
            continue;
        }
        let reply = post(app, &uri, body).await;
        assert_eq!(reply.status, StatusCode::CREATED, "{uri}: {}", reply.raw);
    }
}

fn sample_request() -> Value {
    json!({"originator": "Originator0", "p": 450, "d": 4, "levs": 2, "ress": 3, "sups": 4})
}

#[tokio::test]
async fn create_request_returns_block() {
    let (app, _) = open_app();
    let reply = post(&app, "/requests", sample_request()).await;
    assert_eq!(reply.status, StatusCode::CREATED);
    assert_eq!(reply.json["sequence"], json!(0));
    assert_eq!(reply.json["requestId"], json!(1));
    assert_eq!(reply.json["blockHash"].as_str().unwrap().len(), 64);
    let second = post(&app, "/requests", sample_request()).await;
    assert_eq!(second.json["requestId"], json!(2));
}

#[tokio::test]
async fn supplier_form_is_accepted() {
    let (app, _) = open_app();
    post(&app, "/requests", sample_request()).await;
    let group = post(&app, "/requests/1/levels/1/resources/1", json!({"resourceName": "K1", "g": 0.4, "BOM": 8})).await;
    assert_eq!(group.status, StatusCode::CREATED);
    let supply = json!({
        "m": 0,
        "supplierData": {"supplierName": "M0", "supplierId": "https://m1@www.supplier1.com:456/"},
        "economicProfile": {"cf": 35, "cv": 35, "additionalData": {}},
        "productionProfile": {"q": 12, "tp": 365}
    });
    let reply = post(&app, "/requests/1/levels/1/resources/1/supplies", supply).await;
    assert_eq!(reply.status, StatusCode::CREATED, "{}", reply.raw);
    assert_eq!(reply.json["sequence"], json!(2));
}

#[tokio::test]
async fn run_while_open_conflicts() {
    let (app, _) = open_app();
    post(&app, "/requests", sample_request()).await;
    let reply = post(&app, "/requests/1/run", json!({})).await;
    assert_eq!(reply.status, StatusCode::CONFLICT);
    assert_eq!(reply.json["code"], "ILLEGAL_TRANSITION");
    assert_eq!(reply.json["httpStatus"], json!(409));
}

#[tokio::test]
async fn unknown_request() {
    let (app, _) = open_app();
    let reply = get(&app, "/requests/999").await;
    assert_eq!(reply.status, StatusCode::NOT_FOUND);
    assert_eq!(reply.json["code"], "NOT_FOUND");
    let reply = post(&app, "/requests/999/seal", json!({})).await;
    assert_eq!(reply.status, StatusCode::NOT_FOUND);
    assert_eq!(reply.json["code"], "UNKNOWN_REQUEST");
}

#[tokio::test]
async fn listing_build_end_to_end() {
    let (app, state) = open_app();
    let chain = testkit::listing_chain();
    build(&app, &chain, false).await;

    let view = get(&app, "/requests/1").await;
    assert_eq!(view.status, StatusCode::OK);
    assert_eq!(view.json["phase"], "SEALED");
    assert_eq!(parse_chain_value(&view.json["descriptor"]).unwrap(), chain);
    assert_eq!(get(&app, "/requests/1/result").await.status, StatusCode::CONFLICT);

    let ran = post(&app, "/requests/1/run", json!({})).await;
    assert_eq!(ran.status, StatusCode::CREATED);
    let result = get(&app, "/requests/1/result").await;
    assert_eq!(result.status, StatusCode::OK);
    assert_eq!(result.raw, to_canonical_string(&run_sharing(&chain).unwrap().to_json()));

    let view = get(&app, "/requests/1").await;
    assert_eq!(view.json["phase"], "COMPUTED");
    let sum: Money = view.json["result"]["payouts"]
        .as_array()
        .unwrap()
        .iter()
        .map(|l| l["roundedTotal"].as_str().unwrap().parse::<Money>().unwrap())
        .sum();
    assert_eq!(sum, Money::from_integer(1800));
    let ledger = state.ledger();
    assert_eq!(ledger.read().unwrap().state(1).unwrap().phase, Phase::Computed);
}

#[tokio::test]
async fn reads_are_stable_and_pure() {
    let (app, _) = open_app();
    build(&app, &testkit::mini_chain(), true).await;
    let before = get(&app, "/ledger/integrity").await;
    let a = get(&app, "/requests/1").await;
    let b = get(&app, "/requests/1").await;
    get(&app, "/requests/1/result").await;
    get(&app, "/ledger/state").await;
    let after = get(&app, "/ledger/integrity").await;
    assert_eq!(a.raw, b.raw);
    assert_eq!(before.raw, after.raw);
    assert_eq!(after.json["valid"], json!(true));
    assert_eq!(a.raw, to_canonical_string(&a.json));
}

#[tokio::test]
async fn each_write_is_one_block() {
    let (app, state) = open_app();
    let calls = build_calls(&testkit::mini_chain());
    for (n, (uri, body)) in calls.iter().enumerate() {
        let reply = post(&app, uri, body.clone()).await;
        assert_eq!(reply.json["sequence"], json!(n));
        assert_eq!(state.ledger().read().unwrap().len(), n + 1);
    }
    let failed = post(&app, "/requests/1/run", json!({})).await;
    assert_eq!(failed.status, StatusCode::CONFLICT);
    assert_eq!(state.ledger().read().unwrap().len(), calls.len());
}

#[tokio::test]
async fn schema_errors_name_the_field() {
    let (app, _) = open_app();
    post(&app, "/requests", sample_request()).await;
    let reply = post(&app, "/requests/1/levels/1/resources/0", json!({"resourceName": "K1", "g": "0.4"})).await;
    assert_eq!(reply.status, StatusCode::BAD_REQUEST);
    assert_eq!(reply.json["code"], "SCHEMA_VIOLATION");
    assert_eq!(reply.json["path"], "$.g");

    let reply = post(&app, "/requests/1/levels/1/resources/0", json!({"k": 3})).await;
    assert_eq!(reply.json["path"], "$.k");

    let reply = call(&app, Method::POST, "/requests/1/options", None, None).await;
    assert_eq!(reply.status, StatusCode::CREATED);

    let bad = Request::builder()
        .method(Method::POST)
        .uri("/requests/1/options")
        .body(Body::from("{\"scheme\":"))
        .unwrap();
    let response = app.clone().oneshot(bad).await.unwrap();
    assert_eq!(response.status(), StatusCode::BAD_REQUEST);

    let reply = post(&app, "/requests/x/seal", json!({})).await;
    assert_eq!(reply.json["code"], "BAD_REQUEST");
    let reply = get(&app, "/nowhere").await;
    assert_eq!(reply.status, StatusCode::NOT_FOUND);
}

#[tokio::test]
async fn validation_failure_on_seal() {
    let (app, _) = open_app();
    let mut chain = testkit::mini_chain();
    chain.levels[0].resources[0].quota = consortium_core::money::ratio(9, 10);
    for (uri, body) in build_calls(&chain) {
        let reply = post(&app, &uri, body).await;
        if uri.ends_with("/seal") {
            assert_eq!(reply.status, StatusCode::UNPROCESSABLE_ENTITY);
            assert_eq!(reply.json["code"], "VALIDATION_FAILED");
            assert_eq!(reply.json["path"], "$.levels");
            assert!(reply.json["detail"].as_str().unwrap().contains("QUOTA_SUM"));
            break;
        }
    }
}

#[tokio::test]
async fn bearer_tokens_identify_actors() {
    let tokens = TokenTable::parse("t-orig urn:originator\nt-sup urn:supplier:0\n").unwrap();
    let state = AppState::new(Ledger::new(), tokens).with_clock(|| 7);
    let app = router(state.clone());

    let reply = call(&app, Method::POST, "/requests", None, Some(&sample_request())).await;
    assert_eq!(reply.status, StatusCode::UNAUTHORIZED);
    assert_eq!(reply.json["code"], "UNAUTHORIZED");
    let reply = call(&app, Method::POST, "/requests", Some("bogus"), Some(&sample_request())).await;
    assert_eq!(reply.status, StatusCode::UNAUTHORIZED);

    let reply = call(&app, Method::POST, "/requests", Some("t-orig"), Some(&sample_request())).await;
    assert_eq!(reply.status, StatusCode::CREATED);
    {
        let ledger = state.ledger();
        let ledger = ledger.read().unwrap();
        assert_eq!(ledger.entries()[0].transaction.actor_id, "urn:originator");
        assert_eq!(ledger.entries()[0].transaction.timestamp, 7);
    }
    assert_eq!(get(&app, "/requests/1").await.status, StatusCode::OK);
}

#[tokio::test]
async fn persisted_ledger_reloads() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("api.log");
    let hash = {
        let state = AppState::new(Ledger::open(&path).unwrap(), OpenAccess::default());
        let app = router(state);
        build(&app, &testkit::listing_chain(), true).await;
        get(&app, "/ledger/integrity").await.json["stateHash"].clone()
    };
    let state = AppState::new(Ledger::open(&path).unwrap(), OpenAccess::default());
    let app = router(state);
    let integrity = get(&app, "/ledger/integrity").await;
    assert_eq!(integrity.json["stateHash"], hash);
    assert_eq!(integrity.json["valid"], json!(true));
    assert_eq!(get(&app, "/requests/1").await.json["phase"], "COMPUTED");
}
