mod common;

use std::fs;
use std::path::{Path, PathBuf};

use axum::http::StatusCode;
use common::{app, call};
use serde_json::json;

fn log_path(dir: &Path, id: &str) -> PathBuf {
    dir.join("sessions").join(format!("{id}.jsonl"))
}

/// create, hint, view code, cancel, edit: five events
async fn five_events(dir: &Path) -> String {
    let app = app(dir);
    let (_, created) = call(&app, "POST", "/sessions", Some(json!({"taskId": "ng-secret"}))).await;
    let id = created["sessionId"].as_str().unwrap().to_string();
    let (_, hint) = call(&app, "POST", &format!("/sessions/{id}/hint"), None).await;
    let hint_id = hint["hintId"].as_str().unwrap();
    call(&app, "GET", &format!("/sessions/{id}/hints/{hint_id}/code"), None).await;
    call(&app, "POST", &format!("/sessions/{id}/hints/{hint_id}/cancel"), None).await;
    let (st, _) = call(&app, "PUT", &format!("/sessions/{id}/code"), Some(json!({"code": "fun main() {\n}\n"}))).await;
    assert_eq!(st, StatusCode::NO_CONTENT);
    id
}

#[tokio::test]
async fn sessions_survive_a_restart() {
    let dir = tempfile::tempdir().unwrap();
    let id = five_events(dir.path()).await;
    let before = fs::read_to_string(log_path(dir.path(), &id)).unwrap();
    assert_eq!(before.lines().count(), 5);

    let restarted = app(dir.path());
    let (st, view) = call(&restarted, "GET", &format!("/sessions/{id}"), None).await;
    assert_eq!(st, StatusCode::OK);
    assert_eq!(view["events"], 5);
    assert_eq!(view["code"], "fun main() {\n}\n");
    assert_eq!(fs::read_to_string(log_path(dir.path(), &id)).unwrap(), before);
}

#[tokio::test]
async fn truncated_last_line_is_dropped() {
    let dir = tempfile::tempdir().unwrap();
    let id = five_events(dir.path()).await;
    let path = log_path(dir.path(), &id);
    let text = fs::read_to_string(&path).unwrap();
    fs::write(&path, &text[..text.len() - 20]).unwrap();

    let restarted = app(dir.path());
    let (st, view) = call(&restarted, "GET", &format!("/sessions/{id}"), None).await;
    assert_eq!(st, StatusCode::OK);
    assert_eq!(view["events"], 4);
    // later appends land on a clean line
    let (st, _) = call(&restarted, "PUT", &format!("/sessions/{id}/code"), Some(json!({"code": "x"}))).await;
    assert_eq!(st, StatusCode::NO_CONTENT);
    let again = app(dir.path());
    assert_eq!(call(&again, "GET", &format!("/sessions/{id}"), None).await.1["events"], 5);
}

#[tokio::test]
async fn corrupt_middle_line_is_unrecoverable() {
    let dir = tempfile::tempdir().unwrap();
    let id = five_events(dir.path()).await;
    let path = log_path(dir.path(), &id);
    let mut lines: Vec<String> = fs::read_to_string(&path).unwrap().lines().map(String::from).collect();
    lines[2] = "{ garbage".into();
    fs::write(&path, lines.join("\n") + "\n").unwrap();

    let restarted = app(dir.path());
    let (st, _) = call(&restarted, "GET", &format!("/sessions/{id}"), None).await;
    assert_eq!(st, StatusCode::INTERNAL_SERVER_ERROR);
    let (st, _) = call(&restarted, "PUT", &format!("/sessions/{id}/code"), Some(json!({"code": "x"}))).await;
    assert_eq!(st, StatusCode::INTERNAL_SERVER_ERROR);
    assert_eq!(fs::read_to_string(&path).unwrap().lines().count(), 5);
}
