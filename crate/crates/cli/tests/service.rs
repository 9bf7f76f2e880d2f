use std::sync::Arc;

use axum::body::Body;
use axum::http::{Request, StatusCode};
use axum::Router;
use futures::StreamExt;
use http_body_util::BodyExt;
use serde_json::{json, Value};
use tower::ServiceExt;

use nlcmd::service::Service;
use nlcmd_core::demo;

fn app() -> Router {
    Arc::new(Service::new(Arc::new(demo::english_config()), "editor", demo::sample_document(), Vec::new())).router(None)
}

async fn call(app: &Router, method: &str, uri: &str, body: Option<Value>) -> (StatusCode, Value) {
    let (status, bytes) = call_raw(app, method, uri, body.map(|b| b.to_string().into_bytes())).await;
    let value = if bytes.is_empty() { Value::Null } else { serde_json::from_slice(&bytes).unwrap() };
    (status, value)
}

async fn call_raw(app: &Router, method: &str, uri: &str, body: Option<Vec<u8>>) -> (StatusCode, Vec<u8>) {
    let mut req = Request::builder().method(method).uri(uri);
    if body.is_some() {
        req = req.header("content-type", "application/json");
    }
    let resp = app.clone().oneshot(req.body(Body::from(body.unwrap_or_default())).unwrap()).await.unwrap();
    let status = resp.status();
    (status, resp.into_body().collect().await.unwrap().to_bytes().to_vec())
}

async fn new_session(app: &Router) -> String {
    let (status, body) = call(app, "POST", "/api/session", None).await;
    assert_eq!(status, StatusCode::CREATED);
    body["id"].as_str().unwrap().to_owned()
}

#[tokio::test]
async fn golden_command_through_the_api() {
    let app = app();
    let id = new_session(&app).await;
    let (status, trace) =
        call(&app, "POST", &format!("/api/session/{id}/command"), Some(json!({"text": demo::GOLDEN_COMMAND}))).await;
    assert_eq!(status, StatusCode::OK);
    assert_eq!(trace["outcome"]["status"], "Executed");
    assert_eq!(trace["outcome"]["frame"]["action"], 1011);
    assert_eq!(trace["outcome"]["result"]["affected"], 3);

    let (status, state) = call(&app, "GET", &format!("/api/session/{id}/state"), None).await;
    assert_eq!(status, StatusCode::OK);
    assert_eq!(state["kind"], "editor");
    assert_eq!(state["lines"][0], "peach pie with orange and bread");
}

#[tokio::test]
async fn selection_and_rejection() {
    let app = app();
    let id = new_session(&app).await;
    let (_, trace) =
        call(&app, "POST", &format!("/api/session/{id}/command"), Some(json!({"text": r#"replcae "a" with "b""#}))).await;
    assert_eq!(trace["outcome"]["status"], "AwaitingSelection");
    let words = trace["outcome"]["suggestions"].as_array().unwrap();
    assert!(words[0]["candidates"].as_array().unwrap().len() <= 5);

    let (status, err) = call(
        &app,
        "POST",
        &format!("/api/session/{id}/selection"),
        Some(json!({"surface": "replcae", "index": 2040})),
    )
    .await;
    assert_eq!(status, StatusCode::UNPROCESSABLE_ENTITY);
    assert_eq!(err["kind"], "NotSuggested");

    let (status, rerun) = call(
        &app,
        "POST",
        &format!("/api/session/{id}/selection"),
        Some(json!({"surface": "replcae", "index": 1011})),
    )
    .await;
    assert_eq!(status, StatusCode::OK);
    assert_eq!(rerun["outcome"]["status"], "Executed");
    assert_eq!(rerun["learner"], json!([]));

    let (status, err) = call(&app, "POST", &format!("/api/session/{id}/rejection"), None).await;
    assert_eq!(status, StatusCode::CONFLICT);
    assert_eq!(err["kind"], "NoPendingSelection");

    call(&app, "POST", &format!("/api/session/{id}/command"), Some(json!({"text": "frobnicate \"a\""}))).await;
    let (status, trace) = call(&app, "POST", &format!("/api/session/{id}/rejection"), None).await;
    assert_eq!(status, StatusCode::OK);
    assert_eq!(trace["outcome"]["status"], "AwaitingRephrase");
}

#[tokio::test]
async fn suits_upload_download_and_load() {
    let app = app();
    let (status, list) = call(&app, "GET", "/api/suits", None).await;
    assert_eq!(status, StatusCode::OK);
    assert_eq!(list[0]["id"], "shapes");

    let (status, bytes) = call_raw(&app, "GET", "/api/suits/shapes", None).await;
    assert_eq!(status, StatusCode::OK);
    assert_eq!(bytes, demo::SHAPES_SUIT.as_bytes());

    let (status, err) = call_raw(&app, "POST", "/api/suits", Some(bytes.clone())).await;
    assert_eq!(status, StatusCode::CONFLICT, "{}", String::from_utf8_lossy(&err));

    let mut renamed: Value = serde_json::from_slice(&bytes).unwrap();
    renamed["meta"]["id"] = json!("shapes-copy");
    renamed["entries"] = json!([]);
    renamed["rules"] = json!([]);
    let (status, meta) = call(&app, "POST", "/api/suits", Some(renamed)).await;
    assert_eq!(status, StatusCode::CREATED);
    assert_eq!(meta["id"], "shapes-copy");

    let (status, err) = call_raw(&app, "POST", "/api/suits", Some(bytes[..bytes.len() / 2].to_vec())).await;
    assert_eq!(status, StatusCode::BAD_REQUEST);
    assert_eq!(serde_json::from_slice::<Value>(&err).unwrap()["kind"], "ParseError");

    let (status, _) = call(&app, "GET", "/api/suits/nope", None).await;
    assert_eq!(status, StatusCode::NOT_FOUND);

    let id = new_session(&app).await;
    let (status, body) = call(&app, "POST", &format!("/api/session/{id}/suit"), Some(json!({"id": "shapes"}))).await;
    assert_eq!((status, body["adapter"].clone()), (StatusCode::OK, json!("shapes")));
    let (_, trace) = call(
        &app,
        "POST",
        &format!("/api/session/{id}/command"),
        Some(json!({"text": "create a sphere with a 5 radius"})),
    )
    .await;
    assert_eq!(trace["outcome"]["status"], "Executed");
    let (_, state) = call(&app, "GET", &format!("/api/session/{id}/state"), None).await;
    assert_eq!(state["objects"][0]["params"]["radius"], 5.0);
}

#[tokio::test]
async fn errors_for_unknown_sessions_and_bad_bodies() {
    let app = app();
    let (status, err) = call(&app, "POST", "/api/session/s99/command", Some(json!({"text": "x"}))).await;
    assert_eq!((status, err["kind"].clone()), (StatusCode::NOT_FOUND, json!("UnknownSession")));
    let id = new_session(&app).await;
    let (status, _) = call(&app, "POST", &format!("/api/session/{id}/command"), Some(json!({"txt": "x"}))).await;
    assert_eq!(status, StatusCode::BAD_REQUEST);
    let (status, err) = call(&app, "POST", "/api/session", Some(json!({"adapter": "maya-real"}))).await;
    assert_eq!((status, err["kind"].clone()), (StatusCode::UNPROCESSABLE_ENTITY, json!("UnknownAdapter")));
    let (status, trace) = call(&app, "POST", &format!("/api/session/{id}/command"), Some(json!({"text": ""}))).await;
    assert_eq!(status, StatusCode::OK);
    assert_eq!(trace["stages"][0]["error"]["kind"], "EmptyInput");
}

#[tokio::test]
async fn events_stream_traces_and_state() {
    let app = app();
    let id = new_session(&app).await;
    let resp = app
        .clone()
        .oneshot(Request::get(format!("/api/events/{id}")).body(Body::empty()).unwrap())
        .await
        .unwrap();
    assert_eq!(resp.status(), StatusCode::OK);
    assert_eq!(resp.headers()["content-type"], "text/event-stream");
    let mut frames = resp.into_body().into_data_stream();

    call(&app, "POST", &format!("/api/session/{id}/command"), Some(json!({"text": r#"delete "apple""#}))).await;
    let mut text = String::new();
    while !(text.contains("event: trace") && text.contains("event: state")) {
        let chunk = frames.next().await.unwrap().unwrap();
        text.push_str(&String::from_utf8_lossy(&chunk));
    }
    let trace_line = text.lines().skip_while(|l| *l != "event: trace").nth(1).unwrap();
    let trace: Value = serde_json::from_str(trace_line.strip_prefix("data: ").unwrap()).unwrap();
    assert_eq!(trace["outcome"]["result"]["handler"], "delete-text");
}
