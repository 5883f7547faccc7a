use std::sync::Arc;

use axum::body::{to_bytes, Body};
use axum::http::{Request, StatusCode};
use axum::Router;
use serde_json::{json, Value};
use tower::ServiceExt;

use misere_cli::api::router;
use misere_core::session::SessionStore;

fn app() -> Router {
    router(Arc::new(SessionStore::new()))
}

async fn call(app: &Router, method: &str, uri: &str, body: Option<Value>) -> (StatusCode, Value) {
    let builder = Request::builder().method(method).uri(uri);
    let req = match body {
        Some(b) => builder
            .header("content-type", "application/json")
            .body(Body::from(b.to_string())),
        None => builder.body(Body::empty()),
    }
    .unwrap();
    let resp = app.clone().oneshot(req).await.unwrap();
    let status = resp.status();
    let bytes = to_bytes(resp.into_body(), usize::MAX).await.unwrap();
    let value = serde_json::from_slice(&bytes).unwrap_or(Value::Null);
    (status, value)
}

fn assert_prob(v: &Value, fraction: &str) {
    assert_eq!(v["fraction"], fraction, "{v}");
    assert!(v["decimal"].is_f64(), "{v}");
}

#[tokio::test]
async fn session_lifecycle() {
    let app = app();
    let (status, created) = call(
        &app,
        "POST",
        "/api/session",
        Some(json!({"tree": "path:7", "engine": "optimal", "human_first": true, "seed": 11, "hints": true})),
    )
    .await;
    assert_eq!(status, StatusCode::OK);
    let id = created["id"].as_str().unwrap().to_string();
    let state = &created["state"];
    assert_eq!(state["live"].as_array().unwrap().len(), 7);
    assert_eq!(state["status"], "active");
    assert!(state.get("mine").is_none());
    assert_eq!(state["hints"]["best"], json!([2, 6]));
    assert_prob(&state["hints"]["values"]["2"], "4/7");

    let (status, view) = call(&app, "GET", &format!("/api/session/{id}"), None).await;
    assert_eq!(status, StatusCode::OK);
    assert!(!view.to_string().contains("mine"));

    // play the lowest live vertex until the game ends
    let mut live: Vec<u64> = view["live"].as_array().unwrap().iter().map(|v| v.as_u64().unwrap()).collect();
    let mut finished = None;
    for _ in 0..7 {
        let (status, outcome) = call(
            &app,
            "POST",
            &format!("/api/session/{id}/guess"),
            Some(json!({"vertex": live[0]})),
        )
        .await;
        assert_eq!(status, StatusCode::OK, "{outcome}");
        if outcome["status"] != "active" {
            assert!(outcome["mine"].is_u64());
            finished = Some(outcome);
            break;
        }
        assert!(outcome.get("mine").is_none());
        let (_, view) = call(&app, "GET", &format!("/api/session/{id}"), None).await;
        live = view["live"].as_array().unwrap().iter().map(|v| v.as_u64().unwrap()).collect();
    }
    assert!(finished.is_some());
    let (status, err) = call(&app, "POST", &format!("/api/session/{id}/guess"), Some(json!({"vertex": 1}))).await;
    assert_eq!(status, StatusCode::CONFLICT);
    assert_eq!(err["error"]["code"], "session_finished");
}

#[tokio::test]
async fn engine_first_and_errors() {
    let app = app();
    let (status, created) = call(
        &app,
        "POST",
        "/api/session",
        Some(json!({"tree": "star:5", "engine": "random", "human_first": false, "seed": 3})),
    )
    .await;
    assert_eq!(status, StatusCode::OK);
    let history = created["state"]["history"].as_array().unwrap();
    assert_eq!(history.len(), 1);
    assert_eq!(history[0]["actor"], "engine");

    let (status, err) = call(&app, "POST", "/api/session", Some(json!({"tree": "path:x"}))).await;
    assert_eq!(status, StatusCode::BAD_REQUEST);
    assert_eq!(err["error"]["code"], "invalid_tree");
    assert!(err["error"]["message"].as_str().unwrap().contains("`x`"));

    let (status, created) = call(&app, "POST", "/api/session", Some(json!({"tree": "path:9", "engine": "random", "seed": 4}))).await;
    assert_eq!(status, StatusCode::OK);
    let id = created["id"].as_str().unwrap();
    let (status, err) = call(&app, "POST", &format!("/api/session/{id}/guess"), Some(json!({"vertex": 42}))).await;
    assert_eq!(status, StatusCode::BAD_REQUEST);
    assert_eq!(err["error"]["code"], "vertex_dead");

    let (status, err) = call(&app, "GET", "/api/session/nope", None).await;
    assert_eq!(status, StatusCode::NOT_FOUND);
    assert_eq!(err["error"]["code"], "unknown_session");
}

#[tokio::test]
async fn analysis_endpoints() {
    let app = app();
    let (status, report) = call(&app, "GET", "/api/analyze?tree=path:4&mode=optimal", None).await;
    assert_eq!(status, StatusCode::OK);
    assert_prob(&report["value"], "1/2");
    assert_eq!(report["best_moves"], json!([2, 3]));

    let (status, report) = call(&app, "GET", "/api/analyze?tree=star:5&mode=exploit", None).await;
    assert_eq!(status, StatusCode::OK);
    assert_prob(&report["p"], "4/5");
    assert_prob(&report["q"], "17/25");

    let (status, err) = call(&app, "GET", "/api/analyze?tree=path:3&mode=fast", None).await;
    assert_eq!(status, StatusCode::BAD_REQUEST);
    assert_eq!(err["error"]["code"], "invalid_mode");

    let (status, tables) = call(&app, "GET", "/api/tables?n=10", None).await;
    assert_eq!(status, StatusCode::OK);
    let rows = tables["rows"].as_array().unwrap();
    assert_eq!(rows.len(), 10);
    assert_eq!(rows[4]["p"]["fraction"], "8/15");
    assert!((rows[9]["q"]["decimal"].as_f64().unwrap() - 0.5982539682539684).abs() < 1e-15);

    let (status, err) = call(&app, "GET", "/api/tables?n=2", None).await;
    assert_eq!(status, StatusCode::BAD_REQUEST);
    assert_eq!(err["error"]["code"], "invalid_size");
}
