//! HTTP service for the playground: tasks, sessions and the hint flow.

pub mod store;

use std::path::Path;
use std::sync::Arc;

use axum::extract::{Path as UrlPath, State};
use axum::http::{HeaderValue, StatusCode};
use axum::response::{IntoResponse, Response};
use axum::routing::{get, post, put};
use axum::{Json, Router};
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};
use stepwise_core::diff::diff_modules;
use stepwise_core::gateway::{Gateway, GatewayError};
use stepwise_core::model::{HintBundle, LineSpan, Provenance, StudentSnapshot, TaskSpec};
use stepwise_core::pipeline::{generate_hint, HintResult, NoHintReason, PipelineOutcome};
use stepwise_core::syntax::parse;
use tower_http::cors::{AllowOrigin, CorsLayer};
use uuid::Uuid;

use store::{EventKind, Session, SessionStore, StoreError};

pub const DEFAULT_PORT: u16 = 8077;

pub struct AppState {
    pub tasks: Vec<TaskSpec>,
    pub gateway: Arc<Gateway>,
    pub store: SessionStore,
}

impl AppState {
    pub fn new(tasks: Vec<TaskSpec>, gateway: Gateway, data_dir: &Path) -> std::io::Result<Self> {
        Ok(Self { tasks, gateway: Arc::new(gateway), store: SessionStore::new(data_dir)? })
    }

    fn task(&self, id: &str) -> Option<&TaskSpec> {
        self.tasks.iter().find(|t| t.id == id)
    }
}

#[derive(Debug)]
pub struct ApiError {
    status: StatusCode,
    body: Value,
}

impl ApiError {
    fn new(status: StatusCode, error: &str) -> Self {
        Self { status, body: json!({ "error": error }) }
    }

    fn not_found(what: &str) -> Self {
        Self::new(StatusCode::NOT_FOUND, &format!("{what} not found"))
    }
}

impl IntoResponse for ApiError {
    fn into_response(self) -> Response {
        (self.status, Json(self.body)).into_response()
    }
}

impl From<StoreError> for ApiError {
    fn from(e: StoreError) -> Self {
        match e {
            StoreError::NotFound => ApiError::not_found("session"),
            other => ApiError::new(StatusCode::INTERNAL_SERVER_ERROR, &other.to_string()),
        }
    }
}

impl From<GatewayError> for ApiError {
    fn from(e: GatewayError) -> Self {
        let mut err = ApiError::new(StatusCode::BAD_GATEWAY, &e.to_string());
        if let GatewayError::FixtureMiss { fingerprint, .. } = &e {
            err.body["fingerprint"] = json!(fingerprint);
        }
        err
    }
}

fn no_hint(reason: &NoHintReason) -> ApiError {
    let mut body = serde_json::to_value(reason).expect("reasons serialize");
    body["error"] = json!("no hint");
    ApiError { status: StatusCode::UNPROCESSABLE_ENTITY, body }
}

type ApiResult<T> = Result<T, ApiError>;
type AppRef = State<Arc<AppState>>;

fn title(task: &TaskSpec) -> String {
    task.description
        .lines()
        .map(|l| l.trim().trim_start_matches('#').trim())
        .find(|l| !l.is_empty())
        .unwrap_or(&task.id)
        .to_string()
}

#[derive(Serialize)]
#[serde(rename_all = "camelCase")]
struct TaskSummary {
    id: String,
    project: String,
    title: String,
}

async fn list_tasks(State(app): AppRef) -> Json<Vec<TaskSummary>> {
    Json(app.tasks.iter().map(|t| TaskSummary { id: t.id.clone(), project: t.project_id.clone(), title: title(t) }).collect())
}

#[derive(Serialize)]
#[serde(rename_all = "camelCase")]
struct TaskDetail {
    id: String,
    project: String,
    title: String,
    description: String,
    predefined_hints: Vec<String>,
    topics: Vec<String>,
}

async fn get_task(State(app): AppRef, UrlPath(id): UrlPath<String>) -> ApiResult<Json<TaskDetail>> {
    let t = app.task(&id).ok_or_else(|| ApiError::not_found("task"))?;
    Ok(Json(TaskDetail {
        id: t.id.clone(),
        project: t.project_id.clone(),
        title: title(t),
        description: t.description.clone(),
        predefined_hints: t.predefined_hints.clone(),
        topics: t.theory_topics.clone(),
    }))
}

#[derive(Deserialize)]
#[serde(rename_all = "camelCase")]
struct CreateSession {
    task_id: String,
    code: Option<String>,
}

#[derive(Serialize)]
#[serde(rename_all = "camelCase")]
struct SessionCreated {
    session_id: String,
    starter_code: String,
}

async fn create_session(State(app): AppRef, Json(req): Json<CreateSession>) -> ApiResult<(StatusCode, Json<SessionCreated>)> {
    let task = app.task(&req.task_id).ok_or_else(|| ApiError::not_found("task"))?;
    let code = req.code.or_else(|| task.starter.clone()).unwrap_or_default();
    let id = Uuid::new_v4().to_string();
    app.store.create(&id, &task.id, &code)?;
    Ok((StatusCode::CREATED, Json(SessionCreated { session_id: id, starter_code: code })))
}

#[derive(Serialize)]
#[serde(rename_all = "camelCase")]
struct Highlight {
    start_line: usize,
    end_line: usize,
}

impl From<LineSpan> for Highlight {
    fn from(s: LineSpan) -> Self {
        Highlight { start_line: s.start, end_line: s.end }
    }
}

#[derive(Serialize)]
#[serde(rename_all = "camelCase")]
struct TextHintBody {
    hint_id: String,
    text: String,
    highlight: Highlight,
}

impl From<&HintBundle> for TextHintBody {
    fn from(b: &HintBundle) -> Self {
        TextHintBody { hint_id: b.hint_id.clone(), text: b.text_hint.text.clone(), highlight: b.text_hint.highlight.into() }
    }
}

#[derive(Serialize)]
#[serde(rename_all = "camelCase")]
struct SessionView {
    session_id: String,
    task_id: String,
    code: String,
    attempt: u32,
    events: usize,
    pending_hint: Option<TextHintBody>,
}

async fn get_session(State(app): AppRef, UrlPath(id): UrlPath<String>) -> ApiResult<Json<SessionView>> {
    let handle = app.store.get(&id)?;
    let s = handle.lock().await;
    let pending = s
        .last_hint
        .as_ref()
        .and_then(|h| s.hints.get(h))
        .filter(|h| !h.accepted && h.bundle.code_hint.before == s.current_code)
        .map(|h| TextHintBody::from(&h.bundle));
    Ok(Json(SessionView {
        session_id: s.session_id.clone(),
        task_id: s.task_id.clone(),
        code: s.current_code.clone(),
        attempt: s.attempt,
        events: s.events.len(),
        pending_hint: pending,
    }))
}

#[derive(Deserialize)]
struct UpdateCode {
    code: String,
}

async fn update_code(State(app): AppRef, UrlPath(id): UrlPath<String>, Json(req): Json<UpdateCode>) -> ApiResult<StatusCode> {
    let handle = app.store.get(&id)?;
    let mut s = handle.lock().await;
    app.store.append(&mut s, EventKind::CodeUpdated { code: req.code })?;
    Ok(StatusCode::NO_CONTENT)
}

#[derive(Deserialize, Default)]
#[serde(rename_all = "camelCase")]
struct HintRequest {
    test_errors: Option<String>,
}

async fn run_pipeline(app: &Arc<AppState>, s: &Session, attempt: u32, test_errors: Option<String>) -> ApiResult<PipelineOutcome> {
    let task = app.task(&s.task_id).ok_or_else(|| ApiError::not_found("task"))?.clone();
    let snapshot = StudentSnapshot { task_id: s.task_id.clone(), code: s.current_code.clone(), test_errors, attempt };
    let gateway = app.gateway.clone();
    let session_id = s.session_id.clone();
    let outcome = tokio::task::spawn_blocking(move || generate_hint(&task, &snapshot, &gateway, &session_id))
        .await
        .map_err(|e| ApiError::new(StatusCode::INTERNAL_SERVER_ERROR, &e.to_string()))?;
    Ok(outcome?)
}

fn outcome_name(o: &PipelineOutcome) -> String {
    match &o.result {
        HintResult::Bundle(_) => "Hint".into(),
        HintResult::NoHint(r) => r.name().into(),
    }
}

fn respond(o: PipelineOutcome) -> ApiResult<Json<TextHintBody>> {
    match &o.result {
        HintResult::Bundle(b) => Ok(Json(TextHintBody::from(b.as_ref()))),
        HintResult::NoHint(r) => Err(no_hint(r)),
    }
}

async fn request_hint(
    State(app): AppRef,
    UrlPath(id): UrlPath<String>,
    body: Option<Json<HintRequest>>,
) -> ApiResult<Json<TextHintBody>> {
    let req = body.map(|Json(b)| b).unwrap_or_default();
    let handle = app.store.get(&id)?;
    let mut s = handle.lock().await;
    let attempt = s.attempt;
    let outcome = run_pipeline(&app, &s, attempt, req.test_errors.clone()).await?;
    let bundle = outcome.bundle().cloned().map(Box::new);
    let kind = EventKind::HintRequested { attempt, test_errors: req.test_errors, outcome: outcome_name(&outcome), bundle };
    app.store.append(&mut s, kind)?;
    respond(outcome)
}

async fn regenerate_hint(State(app): AppRef, UrlPath(id): UrlPath<String>) -> ApiResult<Json<TextHintBody>> {
    let handle = app.store.get(&id)?;
    let mut s = handle.lock().await;
    let requested = s.events.iter().any(|e| matches!(e.kind, EventKind::HintRequested { .. } | EventKind::HintRegenerated { .. }));
    if !requested {
        return Err(ApiError::new(StatusCode::CONFLICT, "no hint to regenerate"));
    }
    let attempt = s.attempt + 1;
    let errors = s.test_errors.clone();
    let outcome = run_pipeline(&app, &s, attempt, errors).await?;
    let bundle = outcome.bundle().cloned().map(Box::new);
    app.store.append(&mut s, EventKind::HintRegenerated { attempt, outcome: outcome_name(&outcome), bundle })?;
    respond(outcome)
}

#[derive(Serialize)]
struct CodePayload {
    before: String,
    after: String,
    diff: Value,
    provenance: Provenance,
}

async fn hint_code(State(app): AppRef, UrlPath((id, hint_id)): UrlPath<(String, String)>) -> ApiResult<Json<CodePayload>> {
    let handle = app.store.get(&id)?;
    let mut s = handle.lock().await;
    let hint = s.hints.get(&hint_id).ok_or_else(|| ApiError::not_found("hint"))?.bundle.code_hint.clone();
    let diff = match (parse(&hint.before), parse(&hint.after)) {
        (Ok(b), Ok(a)) => serde_json::to_value(diff_modules(&b, &a).to_wire()).expect("change sets serialize"),
        _ => json!([]),
    };
    app.store.append(&mut s, EventKind::CodeHintViewed { hint_id })?;
    Ok(Json(CodePayload { before: hint.before, after: hint.after, diff, provenance: hint.provenance }))
}

#[derive(Serialize)]
struct Accepted {
    code: String,
}

async fn accept_hint(State(app): AppRef, UrlPath((id, hint_id)): UrlPath<(String, String)>) -> ApiResult<Json<Accepted>> {
    let handle = app.store.get(&id)?;
    let mut s = handle.lock().await;
    let hint = s.hints.get(&hint_id).ok_or_else(|| ApiError::not_found("hint"))?.clone();
    let after = hint.bundle.code_hint.after.clone();
    if hint.accepted && s.current_code == after {
        return Ok(Json(Accepted { code: after }));
    }
    if hint.accepted || s.current_code != hint.bundle.code_hint.before {
        return Err(ApiError::new(StatusCode::CONFLICT, "code changed since the hint was created"));
    }
    app.store.append(&mut s, EventKind::HintAccepted { hint_id, code: after.clone() })?;
    Ok(Json(Accepted { code: after }))
}

async fn cancel_hint(State(app): AppRef, UrlPath((id, hint_id)): UrlPath<(String, String)>) -> ApiResult<StatusCode> {
    let handle = app.store.get(&id)?;
    let mut s = handle.lock().await;
    if !s.hints.contains_key(&hint_id) {
        return Err(ApiError::not_found("hint"));
    }
    app.store.append(&mut s, EventKind::HintCancelled { hint_id })?;
    Ok(StatusCode::NO_CONTENT)
}

/// Routes with CORS for `origin`, or for any origin when `None`.
pub fn router(state: Arc<AppState>, origin: Option<&str>) -> Router {
    let allow = match origin.and_then(|o| HeaderValue::from_str(o).ok()) {
        Some(o) => AllowOrigin::exact(o),
        None => AllowOrigin::any(),
    };
    let cors = CorsLayer::new()
        .allow_origin(allow)
        .allow_methods(tower_http::cors::Any)
        .allow_headers(tower_http::cors::Any);
    Router::new()
        .route("/tasks", get(list_tasks))
        .route("/tasks/{id}", get(get_task))
        .route("/sessions", post(create_session))
        .route("/sessions/{id}", get(get_session))
        .route("/sessions/{id}/code", put(update_code))
        .route("/sessions/{id}/hint", post(request_hint))
        .route("/sessions/{id}/hint/regenerate", post(regenerate_hint))
        .route("/sessions/{id}/hints/{hint_id}/code", get(hint_code))
        .route("/sessions/{id}/hints/{hint_id}/accept", post(accept_hint))
        .route("/sessions/{id}/hints/{hint_id}/cancel", post(cancel_hint))
        .layer(cors)
        .with_state(state)
}

pub async fn serve(listener: tokio::net::TcpListener, app: Router) -> std::io::Result<()> {
    axum::serve(listener, app).await
}
