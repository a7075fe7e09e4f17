//! LLM provider access with record/replay fixtures.

use std::collections::BTreeMap;
use std::fs;
use std::path::{Path, PathBuf};
use std::sync::{Arc, Mutex, RwLock};
use std::time::Duration;

use chrono::{DateTime, Utc};
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::prompt::{PromptRequest, Stage};

pub const TOKEN_ENV: &str = "STEPWISE_LLM_TOKEN";

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Mode {
    Replay,
    Record,
    Live,
}

/// Where to find the generated text in a provider reply and how to shape
/// the request body. Defaults follow the common chat-completions format.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(default)]
pub struct WireFormat {
    /// JSON body with `{{model}}` and `{{prompt}}` placeholders; the prompt
    /// is inserted JSON-escaped.
    pub request_template: String,
    /// JSON pointer to the reply text.
    pub response_pointer: String,
}

impl Default for WireFormat {
    fn default() -> Self {
        Self {
            request_template: r#"{"model": {{model}}, "messages": [{"role": "user", "content": {{prompt}}}]}"#.to_string(),
            response_pointer: "/choices/0/message/content".to_string(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(default)]
pub struct ProviderConfig {
    pub mode: Mode,
    pub endpoint: Option<String>,
    pub model: String,
    pub fixture_path: Option<PathBuf>,
    pub timeout_secs: u64,
    pub max_retries: u32,
    pub wire: WireFormat,
}

impl Default for ProviderConfig {
    fn default() -> Self {
        Self {
            mode: Mode::Replay,
            endpoint: None,
            model: "gpt-4".to_string(),
            fixture_path: None,
            timeout_secs: 60,
            max_retries: 2,
            wire: WireFormat::default(),
        }
    }
}

impl ProviderConfig {
    pub fn replay(fixtures: impl Into<PathBuf>) -> Self {
        Self { fixture_path: Some(fixtures.into()), ..Self::default() }
    }

    pub fn validate(&self) -> Result<(), GatewayError> {
        let need_fixtures = matches!(self.mode, Mode::Replay | Mode::Record);
        if need_fixtures && self.fixture_path.is_none() {
            return Err(GatewayError::Config("fixture_path is required in replay and record mode".into()));
        }
        if matches!(self.mode, Mode::Record | Mode::Live) && self.endpoint.is_none() {
            return Err(GatewayError::Config("endpoint is required in record and live mode".into()));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct FixtureEntry {
    pub fingerprint: String,
    pub stage: Stage,
    pub request_text: String,
    pub response_text: String,
    pub recorded_at: DateTime<Utc>,
}

/// Entries keyed by fingerprint, each filed under a task id.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct FixtureSet {
    pub entries: BTreeMap<String, (String, FixtureEntry)>,
}

impl FixtureSet {
    pub fn get(&self, fingerprint: &str) -> Option<&FixtureEntry> {
        self.entries.get(fingerprint).map(|(_, e)| e)
    }

    pub fn insert(&mut self, task_id: &str, entry: FixtureEntry) {
        self.entries.insert(entry.fingerprint.clone(), (task_id.to_string(), entry));
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }
}

#[derive(Debug, Error)]
pub enum FixtureError {
    #[error("{path}: {source}")]
    Io { path: PathBuf, source: std::io::Error },
    #[error("fixture entry {index} ({path}): {source}")]
    Corrupt { index: usize, path: PathBuf, source: serde_json::Error },
    #[error("duplicate fixture fingerprint {fingerprint} ({path})")]
    Duplicate { fingerprint: String, path: PathBuf },
}

fn io_err(path: &Path) -> impl FnOnce(std::io::Error) -> FixtureError + '_ {
    move |source| FixtureError::Io { path: path.to_path_buf(), source }
}

/// Reads `{root}/{task_id}/{fingerprint}.json`. A missing root is an
/// empty set.
pub fn load_fixtures(root: &Path) -> Result<FixtureSet, FixtureError> {
    let mut set = FixtureSet::default();
    if !root.exists() {
        return Ok(set);
    }
    let mut files = Vec::new();
    for task in fs::read_dir(root).map_err(io_err(root))? {
        let task = task.map_err(io_err(root))?.path();
        if !task.is_dir() {
            continue;
        }
        for f in fs::read_dir(&task).map_err(io_err(&task))? {
            let f = f.map_err(io_err(&task))?.path();
            if f.extension().is_some_and(|e| e == "json") {
                files.push(f);
            }
        }
    }
    files.sort();
    for (index, path) in files.into_iter().enumerate() {
        let text = fs::read_to_string(&path).map_err(io_err(&path))?;
        let entry: FixtureEntry =
            serde_json::from_str(&text).map_err(|source| FixtureError::Corrupt { index, path: path.clone(), source })?;
        if set.get(&entry.fingerprint).is_some() {
            return Err(FixtureError::Duplicate { fingerprint: entry.fingerprint, path });
        }
        let task_id = path.parent().and_then(|p| p.file_name()).map(|n| n.to_string_lossy().into_owned()).unwrap_or_default();
        set.insert(&task_id, entry);
    }
    Ok(set)
}

pub fn save_fixture(root: &Path, task_id: &str, entry: &FixtureEntry) -> Result<(), FixtureError> {
    let dir = root.join(task_id);
    fs::create_dir_all(&dir).map_err(io_err(&dir))?;
    let path = dir.join(format!("{}.json", entry.fingerprint));
    let text = serde_json::to_string_pretty(entry).expect("fixture entries serialize");
    fs::write(&path, format!("{text}\n")).map_err(io_err(&path))
}

pub fn save_fixtures(set: &FixtureSet, root: &Path) -> Result<(), FixtureError> {
    for (task_id, entry) in set.entries.values() {
        save_fixture(root, task_id, entry)?;
    }
    Ok(())
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum TransportError {
    #[error("request timed out")]
    Timeout,
    #[error("provider returned {status}: {message}")]
    Status { status: u16, message: String },
    #[error("network error: {0}")]
    Network(String),
    #[error("unexpected reply: {0}")]
    Reply(String),
}

impl TransportError {
    fn transient(&self) -> bool {
        match self {
            TransportError::Timeout | TransportError::Network(_) => true,
            TransportError::Status { status, .. } => *status == 429 || *status >= 500,
            TransportError::Reply(_) => false,
        }
    }
}

/// One round trip to a provider.
pub trait Transport: Send + Sync {
    fn send(&self, request: &PromptRequest) -> Result<String, TransportError>;
}

pub struct HttpTransport {
    client: reqwest::blocking::Client,
    endpoint: String,
    model: String,
    token: Option<String>,
    wire: WireFormat,
}

impl HttpTransport {
    pub fn new(config: &ProviderConfig) -> Result<Self, GatewayError> {
        let endpoint = config.endpoint.clone().ok_or_else(|| GatewayError::Config("missing endpoint".into()))?;
        let client = reqwest::blocking::Client::builder()
            .timeout(Duration::from_secs(config.timeout_secs))
            .build()
            .map_err(|e| GatewayError::Config(e.to_string()))?;
        Ok(Self {
            client,
            endpoint,
            model: config.model.clone(),
            token: std::env::var(TOKEN_ENV).ok(),
            wire: config.wire.clone(),
        })
    }

    fn body(&self, prompt: &str) -> String {
        let json = |s: &str| serde_json::Value::String(s.to_string()).to_string();
        self.wire.request_template.replace("{{model}}", &json(&self.model)).replace("{{prompt}}", &json(prompt))
    }
}

impl Transport for HttpTransport {
    fn send(&self, request: &PromptRequest) -> Result<String, TransportError> {
        let body = self.body(&request.rendered_text);
        let mut req = self.client.post(&self.endpoint).header("content-type", "application/json").body(body);
        if let Some(t) = &self.token {
            req = req.bearer_auth(t);
        }
        let resp = req.send().map_err(|e| {
            if e.is_timeout() {
                TransportError::Timeout
            } else {
                TransportError::Network(e.to_string())
            }
        })?;
        let status = resp.status();
        let text = resp.text().map_err(|e| TransportError::Network(e.to_string()))?;
        if !status.is_success() {
            return Err(TransportError::Status { status: status.as_u16(), message: text });
        }
        let value: serde_json::Value = serde_json::from_str(&text).map_err(|e| TransportError::Reply(e.to_string()))?;
        value
            .pointer(&self.wire.response_pointer)
            .and_then(|v| v.as_str())
            .map(str::to_string)
            .ok_or_else(|| TransportError::Reply(format!("nothing at {}", self.wire.response_pointer)))
    }
}

#[derive(Debug, Error)]
pub enum GatewayError {
    #[error("no fixture for fingerprint {fingerprint} (task {task_id})")]
    FixtureMiss { task_id: String, fingerprint: String },
    #[error("provider timed out")]
    ProviderTimeout,
    #[error("provider error: {0}")]
    Provider(TransportError),
    #[error("invalid provider configuration: {0}")]
    Config(String),
    #[error(transparent)]
    Fixture(#[from] FixtureError),
}

pub struct Gateway {
    config: ProviderConfig,
    fixtures: RwLock<FixtureSet>,
    transport: Option<Arc<dyn Transport>>,
    writer: Mutex<()>,
}

impl Gateway {
    /// Replay gateways never get a transport.
    pub fn new(config: ProviderConfig) -> Result<Self, GatewayError> {
        config.validate()?;
        let transport: Option<Arc<dyn Transport>> = match config.mode {
            Mode::Replay => None,
            Mode::Record | Mode::Live => Some(Arc::new(HttpTransport::new(&config)?)),
        };
        Self::build(config, transport)
    }

    /// Uses `transport` instead of HTTP in record and live mode.
    pub fn with_transport(config: ProviderConfig, transport: Arc<dyn Transport>) -> Result<Self, GatewayError> {
        if config.mode == Mode::Replay && config.fixture_path.is_none() {
            return Err(GatewayError::Config("fixture_path is required in replay mode".into()));
        }
        let transport = (config.mode != Mode::Replay).then_some(transport);
        Self::build(config, transport)
    }

    fn build(config: ProviderConfig, transport: Option<Arc<dyn Transport>>) -> Result<Self, GatewayError> {
        let fixtures = match (&config.mode, &config.fixture_path) {
            (Mode::Replay | Mode::Record, Some(p)) => load_fixtures(p)?,
            _ => FixtureSet::default(),
        };
        Ok(Self { config, fixtures: RwLock::new(fixtures), transport, writer: Mutex::new(()) })
    }

    pub fn config(&self) -> &ProviderConfig {
        &self.config
    }

    pub fn fixture_count(&self) -> usize {
        self.fixtures.read().expect("fixture lock").len()
    }

    pub fn complete(&self, task_id: &str, request: &PromptRequest) -> Result<String, GatewayError> {
        match self.config.mode {
            Mode::Replay => self
                .fixtures
                .read()
                .expect("fixture lock")
                .get(&request.fingerprint)
                .map(|e| e.response_text.clone())
                .ok_or_else(|| GatewayError::FixtureMiss {
                    task_id: task_id.to_string(),
                    fingerprint: request.fingerprint.clone(),
                }),
            Mode::Live => self.call(request),
            Mode::Record => {
                let response = self.call(request)?;
                let entry = FixtureEntry {
                    fingerprint: request.fingerprint.clone(),
                    stage: request.stage,
                    request_text: request.rendered_text.clone(),
                    response_text: response.clone(),
                    recorded_at: Utc::now(),
                };
                let _guard = self.writer.lock().expect("writer lock");
                let root = self.config.fixture_path.as_ref().expect("validated");
                save_fixture(root, task_id, &entry)?;
                self.fixtures.write().expect("fixture lock").insert(task_id, entry);
                Ok(response)
            }
        }
    }

    fn call(&self, request: &PromptRequest) -> Result<String, GatewayError> {
        let transport = self.transport.as_ref().ok_or_else(|| GatewayError::Config("no transport".into()))?;
        let mut attempt = 0;
        loop {
            match transport.send(request) {
                Ok(text) => return Ok(text),
                Err(e) if e.transient() && attempt < self.config.max_retries => {
                    tracing::warn!(attempt, error = %e, "retrying provider call");
                    attempt += 1;
                }
                Err(TransportError::Timeout) => return Err(GatewayError::ProviderTimeout),
                Err(e) => return Err(GatewayError::Provider(e)),
            }
        }
    }
}
