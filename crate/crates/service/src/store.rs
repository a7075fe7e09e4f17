//! Sessions as append-only JSON-lines logs, one file per session.

use std::collections::HashMap;
use std::fs::{self, OpenOptions};
use std::io::Write;
use std::path::{Path, PathBuf};
use std::sync::Arc;

use chrono::{DateTime, Utc};
use serde::{Deserialize, Serialize};
use stepwise_core::model::HintBundle;
use thiserror::Error;
use tokio::sync::Mutex;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type")]
pub enum EventKind {
    SessionCreated { task_id: String, code: String },
    CodeUpdated { code: String },
    HintRequested { attempt: u32, test_errors: Option<String>, outcome: String, bundle: Option<Box<HintBundle>> },
    CodeHintViewed { hint_id: String },
    HintAccepted { hint_id: String, code: String },
    HintCancelled { hint_id: String },
    HintRegenerated { attempt: u32, outcome: String, bundle: Option<Box<HintBundle>> },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Event {
    pub seq: u64,
    pub at: DateTime<Utc>,
    #[serde(flatten)]
    pub kind: EventKind,
}

#[derive(Debug, Clone, PartialEq)]
pub struct StoredHint {
    pub bundle: HintBundle,
    pub accepted: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Session {
    pub session_id: String,
    pub task_id: String,
    pub current_code: String,
    pub attempt: u32,
    pub test_errors: Option<String>,
    pub events: Vec<Event>,
    pub hints: HashMap<String, StoredHint>,
    pub last_hint: Option<String>,
    /// A log line other than the last one could not be read.
    pub unrecoverable: bool,
}

impl Session {
    fn empty(session_id: &str) -> Self {
        Session {
            session_id: session_id.to_string(),
            task_id: String::new(),
            current_code: String::new(),
            attempt: 0,
            test_errors: None,
            events: Vec::new(),
            hints: HashMap::new(),
            last_hint: None,
            unrecoverable: false,
        }
    }

    fn apply(&mut self, e: &Event) {
        match &e.kind {
            EventKind::SessionCreated { task_id, code } => {
                self.task_id = task_id.clone();
                self.current_code = code.clone();
            }
            EventKind::CodeUpdated { code } => {
                self.current_code = code.clone();
                self.attempt = 0;
            }
            EventKind::HintRequested { attempt, test_errors, bundle, .. } => {
                self.attempt = *attempt;
                self.test_errors = test_errors.clone();
                if let Some(b) = bundle {
                    self.remember(b);
                }
            }
            EventKind::HintRegenerated { attempt, bundle, .. } => {
                self.attempt = *attempt;
                if let Some(b) = bundle {
                    self.remember(b);
                }
            }
            EventKind::HintAccepted { hint_id, code } => {
                self.current_code = code.clone();
                self.attempt = 0;
                if let Some(h) = self.hints.get_mut(hint_id) {
                    h.accepted = true;
                }
            }
            EventKind::CodeHintViewed { .. } | EventKind::HintCancelled { .. } => {}
        }
        self.events.push(e.clone());
    }

    fn remember(&mut self, b: &HintBundle) {
        self.hints.insert(b.hint_id.clone(), StoredHint { bundle: b.clone(), accepted: false });
        self.last_hint = Some(b.hint_id.clone());
    }
}

#[derive(Debug, Error)]
pub enum StoreError {
    #[error("session not found")]
    NotFound,
    #[error("session log is corrupt")]
    Unrecoverable,
    #[error("{0}")]
    Io(#[from] std::io::Error),
}

pub type SessionHandle = Arc<Mutex<Session>>;

pub struct SessionStore {
    dir: PathBuf,
    open: std::sync::Mutex<HashMap<String, SessionHandle>>,
}

impl SessionStore {
    pub fn new(data_dir: &Path) -> std::io::Result<Self> {
        let dir = data_dir.join("sessions");
        fs::create_dir_all(&dir)?;
        Ok(Self { dir, open: std::sync::Mutex::new(HashMap::new()) })
    }

    fn path(&self, id: &str) -> PathBuf {
        self.dir.join(format!("{id}.jsonl"))
    }

    fn valid_id(id: &str) -> bool {
        !id.is_empty() && id.chars().all(|c| c.is_ascii_alphanumeric() || c == '-')
    }

    pub fn create(&self, id: &str, task_id: &str, code: &str) -> Result<SessionHandle, StoreError> {
        let mut s = Session::empty(id);
        append(&self.path(id), &mut s, EventKind::SessionCreated { task_id: task_id.into(), code: code.into() })?;
        let h = Arc::new(Mutex::new(s));
        self.open.lock().expect("store lock").insert(id.to_string(), h.clone());
        Ok(h)
    }

    /// Open session, loading its log on first use.
    pub fn get(&self, id: &str) -> Result<SessionHandle, StoreError> {
        if !Self::valid_id(id) {
            return Err(StoreError::NotFound);
        }
        let mut open = self.open.lock().expect("store lock");
        if let Some(h) = open.get(id) {
            return Ok(h.clone());
        }
        let s = load_session(&self.path(id), id)?;
        if s.unrecoverable {
            return Err(StoreError::Unrecoverable);
        }
        let h = Arc::new(Mutex::new(s));
        open.insert(id.to_string(), h.clone());
        Ok(h)
    }

    pub fn append(&self, session: &mut Session, kind: EventKind) -> Result<(), StoreError> {
        append(&self.path(&session.session_id), session, kind)
    }
}

fn append(path: &Path, session: &mut Session, kind: EventKind) -> Result<(), StoreError> {
    if session.unrecoverable {
        return Err(StoreError::Unrecoverable);
    }
    let event = Event { seq: session.events.len() as u64, at: Utc::now(), kind };
    let line = serde_json::to_string(&event).expect("events serialize");
    let mut f = OpenOptions::new().create(true).append(true).open(path)?;
    writeln!(f, "{line}")?;
    f.flush()?;
    session.apply(&event);
    Ok(())
}

/// Replays a log. An unreadable last line is dropped from the file with a
/// warning; an unreadable line elsewhere marks the session unrecoverable.
pub fn load_session(path: &Path, id: &str) -> Result<Session, StoreError> {
    let text = match fs::read_to_string(path) {
        Ok(t) => t,
        Err(e) if e.kind() == std::io::ErrorKind::NotFound => return Err(StoreError::NotFound),
        Err(e) => return Err(e.into()),
    };
    let lines: Vec<&str> = text.lines().filter(|l| !l.trim().is_empty()).collect();
    let mut s = Session::empty(id);
    for (i, line) in lines.iter().enumerate() {
        match serde_json::from_str::<Event>(line) {
            Ok(e) => s.apply(&e),
            Err(err) if i + 1 == lines.len() => {
                tracing::warn!(session = id, line = i + 1, error = %err, "dropping unreadable last log line");
                // later appends must not land on the broken line
                let kept: String = lines[..i].iter().map(|l| format!("{l}\n")).collect();
                fs::write(path, kept)?;
            }
            Err(err) => {
                tracing::error!(session = id, line = i + 1, error = %err, "session log is corrupt");
                s.unrecoverable = true;
                break;
            }
        }
    }
    if s.events.is_empty() && !s.unrecoverable {
        return Err(StoreError::NotFound);
    }
    Ok(s)
}
