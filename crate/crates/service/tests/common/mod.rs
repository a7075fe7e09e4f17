#![allow(dead_code)]

use std::path::Path;
use std::sync::Arc;

use axum::body::Body;
use axum::http::{Request, StatusCode};
use axum::Router;
use http_body_util::BodyExt;
use serde_json::Value;
use stepwise_service::{router, AppState};
use tower::ServiceExt;

pub fn app(data_dir: &Path) -> Router {
    let state = AppState::new(stepwise_testkit::load_course(), stepwise_testkit::replay_gateway(), data_dir).unwrap();
    router(Arc::new(state), None)
}

pub async fn call(app: &Router, method: &str, uri: &str, body: Option<Value>) -> (StatusCode, Value) {
    let mut req = Request::builder().method(method).uri(uri);
    let body = match body {
        Some(v) => {
            req = req.header("content-type", "application/json");
            Body::from(v.to_string())
        }
        None => Body::empty(),
    };
    let res = app.clone().oneshot(req.body(body).unwrap()).await.unwrap();
    let status = res.status();
    let bytes = res.into_body().collect().await.unwrap().to_bytes();
    let value = if bytes.is_empty() { Value::Null } else { serde_json::from_slice(&bytes).unwrap() };
    (status, value)
}

pub fn corpus_code(id: &str) -> String {
    stepwise_testkit::load_corpus_snapshots().into_iter().find(|s| s.id == id).unwrap().snapshot.code
}
