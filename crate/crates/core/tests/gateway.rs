use std::sync::Arc;

use chrono::Utc;
use stepwise_core::gateway::{
    load_fixtures, save_fixture, save_fixtures, FixtureEntry, FixtureError, FixtureSet, Gateway, GatewayError, Mode,
    ProviderConfig, TransportError,
};
use stepwise_core::prompt::{PromptRequest, Stage};
use stepwise_testkit::{CountingTransport, FlakyTransport, ScriptedTransport};

fn request(text: &str) -> PromptRequest {
    PromptRequest::new(Stage::Subgoals, text.to_string(), 0)
}

fn entry(req: &PromptRequest, reply: &str) -> FixtureEntry {
    FixtureEntry {
        fingerprint: req.fingerprint.clone(),
        stage: req.stage,
        request_text: req.rendered_text.clone(),
        response_text: reply.to_string(),
        recorded_at: Utc::now(),
    }
}

fn recording(dir: &std::path::Path) -> ProviderConfig {
    ProviderConfig {
        mode: Mode::Record,
        endpoint: Some("scripted://".into()),
        fixture_path: Some(dir.to_path_buf()),
        ..ProviderConfig::default()
    }
}

fn live(max_retries: u32) -> ProviderConfig {
    ProviderConfig { mode: Mode::Live, endpoint: Some("scripted://".into()), max_retries, ..ProviderConfig::default() }
}

#[test]
fn replay_returns_the_stored_reply() {
    let dir = tempfile::tempdir().unwrap();
    let req = request("plan please");
    save_fixture(dir.path(), "t1", &entry(&req, "1. [CODE] do it")).unwrap();
    let gw = Gateway::new(ProviderConfig::replay(dir.path())).unwrap();
    assert_eq!(gw.complete("t1", &req).unwrap(), "1. [CODE] do it");
}

#[test]
fn replay_miss_names_the_fingerprint() {
    let dir = tempfile::tempdir().unwrap();
    let gw = Gateway::new(ProviderConfig::replay(dir.path())).unwrap();
    let req = request("unknown");
    match gw.complete("t1", &req) {
        Err(GatewayError::FixtureMiss { task_id, fingerprint }) => {
            assert_eq!(task_id, "t1");
            assert_eq!(fingerprint, req.fingerprint);
        }
        other => panic!("{other:?}"),
    }
}

#[test]
fn replay_never_touches_the_transport() {
    let dir = tempfile::tempdir().unwrap();
    let req = request("plan please");
    save_fixture(dir.path(), "t1", &entry(&req, "ok")).unwrap();
    let counter = Arc::new(CountingTransport::default());
    let gw = Gateway::with_transport(ProviderConfig::replay(dir.path()), counter.clone()).unwrap();
    assert_eq!(gw.complete("t1", &req).unwrap(), "ok");
    assert!(gw.complete("t1", &request("miss")).is_err());
    assert_eq!(counter.calls(), 0);
}

#[test]
fn recorded_replies_replay_identically() {
    let dir = tempfile::tempdir().unwrap();
    let script = Arc::new(
        ScriptedTransport::new().with(Stage::Subgoals, "first").with(Stage::CodeHint, "```kotlin\nfun main() {}\n```"),
    );
    let gw = Gateway::with_transport(recording(dir.path()), script.clone()).unwrap();
    let a = request("a");
    let b = PromptRequest::new(Stage::CodeHint, "b".into(), 0);
    let ra = gw.complete("t1", &a).unwrap();
    let rb = gw.complete("t2", &b).unwrap();
    assert_eq!(script.calls(), 2);
    assert_eq!(gw.fixture_count(), 2);
    assert!(dir.path().join("t1").join(format!("{}.json", a.fingerprint)).is_file());

    let replay = Gateway::new(ProviderConfig::replay(dir.path())).unwrap();
    assert_eq!(replay.complete("t1", &a).unwrap(), ra);
    assert_eq!(replay.complete("t2", &b).unwrap(), rb);
}

#[test]
fn fixture_sets_round_trip() {
    let dir = tempfile::tempdir().unwrap();
    let mut set = FixtureSet::default();
    for (i, task) in ["t1", "t1", "t2"].iter().enumerate() {
        let req = request(&format!("prompt {i}"));
        set.insert(task, entry(&req, &format!("reply {i}")));
    }
    save_fixtures(&set, dir.path()).unwrap();
    assert_eq!(load_fixtures(dir.path()).unwrap(), set);
}

#[test]
fn missing_fixture_dir_is_empty() {
    let dir = tempfile::tempdir().unwrap();
    assert!(load_fixtures(&dir.path().join("absent")).unwrap().is_empty());
    assert!(load_fixtures(dir.path()).unwrap().is_empty());
}

#[test]
fn duplicate_fingerprints_are_rejected() {
    let dir = tempfile::tempdir().unwrap();
    let req = request("same");
    save_fixture(dir.path(), "t1", &entry(&req, "x")).unwrap();
    save_fixture(dir.path(), "t2", &entry(&req, "y")).unwrap();
    match load_fixtures(dir.path()) {
        Err(FixtureError::Duplicate { fingerprint, .. }) => assert_eq!(fingerprint, req.fingerprint),
        other => panic!("{other:?}"),
    }
}

#[test]
fn corrupt_entry_reports_its_index() {
    let dir = tempfile::tempdir().unwrap();
    save_fixture(dir.path(), "t1", &entry(&request("a"), "x")).unwrap();
    std::fs::create_dir_all(dir.path().join("zz")).unwrap();
    std::fs::write(dir.path().join("zz").join("broken.json"), "{ not json").unwrap();
    match load_fixtures(dir.path()) {
        Err(FixtureError::Corrupt { index, path, .. }) => {
            assert_eq!(index, 1);
            assert!(path.ends_with("zz/broken.json"));
        }
        other => panic!("{other:?}"),
    }
    assert!(Gateway::new(ProviderConfig::replay(dir.path())).is_err());
}

#[test]
fn transient_errors_are_retried() {
    let flaky = Arc::new(FlakyTransport::new(
        vec![TransportError::Timeout, TransportError::Status { status: 503, message: "busy".into() }],
        "fine",
    ));
    let gw = Gateway::with_transport(live(2), flaky.clone()).unwrap();
    assert_eq!(gw.complete("t", &request("x")).unwrap(), "fine");
    assert_eq!(flaky.calls(), 3);
}

#[test]
fn retries_are_bounded() {
    let flaky = Arc::new(FlakyTransport::new(vec![TransportError::Timeout; 5], "never"));
    let gw = Gateway::with_transport(live(2), flaky.clone()).unwrap();
    assert!(matches!(gw.complete("t", &request("x")), Err(GatewayError::ProviderTimeout)));
    assert_eq!(flaky.calls(), 3);
}

#[test]
fn client_errors_are_not_retried() {
    for err in [
        TransportError::Status { status: 401, message: "no".into() },
        TransportError::Reply("missing content".into()),
    ] {
        let flaky = Arc::new(FlakyTransport::new(vec![err], "never"));
        let gw = Gateway::with_transport(live(2), flaky.clone()).unwrap();
        assert!(matches!(gw.complete("t", &request("x")), Err(GatewayError::Provider(_))));
        assert_eq!(flaky.calls(), 1);
    }
    let flaky = Arc::new(FlakyTransport::new(vec![TransportError::Status { status: 429, message: "slow".into() }], "ok"));
    let gw = Gateway::with_transport(live(2), flaky.clone()).unwrap();
    assert_eq!(gw.complete("t", &request("x")).unwrap(), "ok");
}

#[test]
fn config_is_validated() {
    assert!(Gateway::new(ProviderConfig::default()).is_err());
    let no_endpoint = ProviderConfig { mode: Mode::Live, ..ProviderConfig::default() };
    assert!(matches!(Gateway::new(no_endpoint), Err(GatewayError::Config(_))));
}

#[test]
fn fingerprints_depend_on_stage_text_and_attempt() {
    let base = PromptRequest::new(Stage::Subgoals, "x".into(), 0);
    assert_eq!(base.fingerprint, PromptRequest::new(Stage::Subgoals, "x".into(), 0).fingerprint);
    assert_ne!(base.fingerprint, PromptRequest::new(Stage::CodeHint, "x".into(), 0).fingerprint);
    assert_ne!(base.fingerprint, PromptRequest::new(Stage::Subgoals, "y".into(), 0).fingerprint);
    assert_ne!(base.fingerprint, PromptRequest::new(Stage::Subgoals, "x".into(), 1).fingerprint);
    assert_ne!(base.fingerprint, base.reask().fingerprint);
}
