use std::collections::HashMap;
use std::sync::atomic::{AtomicUsize, Ordering};
use std::sync::Mutex;

use stepwise_core::gateway::{Transport, TransportError};
use stepwise_core::prompt::{PromptRequest, Stage};

/// Answers each stage from its own queue. The last answer of a stage
/// repeats once the queue runs dry.
#[derive(Default)]
pub struct ScriptedTransport {
    script: Mutex<HashMap<Stage, Vec<String>>>,
    used: Mutex<HashMap<Stage, usize>>,
    log: Mutex<Vec<PromptRequest>>,
    calls: AtomicUsize,
}

impl ScriptedTransport {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn with(self, stage: Stage, reply: impl Into<String>) -> Self {
        self.script.lock().unwrap().entry(stage).or_default().push(reply.into());
        self
    }

    pub fn calls(&self) -> usize {
        self.calls.load(Ordering::SeqCst)
    }

    pub fn requests(&self) -> Vec<PromptRequest> {
        self.log.lock().unwrap().clone()
    }

    pub fn calls_for(&self, stage: Stage) -> usize {
        self.log.lock().unwrap().iter().filter(|r| r.stage == stage).count()
    }
}

impl Transport for ScriptedTransport {
    fn send(&self, request: &PromptRequest) -> Result<String, TransportError> {
        self.calls.fetch_add(1, Ordering::SeqCst);
        self.log.lock().unwrap().push(request.clone());
        let script = self.script.lock().unwrap();
        let Some(replies) = script.get(&request.stage).filter(|r| !r.is_empty()) else {
            return Err(TransportError::Status { status: 500, message: format!("no script for {:?}", request.stage) });
        };
        let mut used = self.used.lock().unwrap();
        let n = used.entry(request.stage).or_insert(0);
        let reply = replies[(*n).min(replies.len() - 1)].clone();
        *n += 1;
        Ok(reply)
    }
}

/// Counts calls and fails each one; stands in for the network.
#[derive(Default)]
pub struct CountingTransport {
    calls: AtomicUsize,
}

impl CountingTransport {
    pub fn calls(&self) -> usize {
        self.calls.load(Ordering::SeqCst)
    }
}

impl Transport for CountingTransport {
    fn send(&self, _request: &PromptRequest) -> Result<String, TransportError> {
        self.calls.fetch_add(1, Ordering::SeqCst);
        Err(TransportError::Network("counting transport does not connect".into()))
    }
}

/// Fails with the given errors in turn, then succeeds with `reply`.
pub struct FlakyTransport {
    errors: Mutex<Vec<TransportError>>,
    reply: String,
    calls: AtomicUsize,
}

impl FlakyTransport {
    pub fn new(mut errors: Vec<TransportError>, reply: impl Into<String>) -> Self {
        errors.reverse();
        Self { errors: Mutex::new(errors), reply: reply.into(), calls: AtomicUsize::new(0) }
    }

    pub fn calls(&self) -> usize {
        self.calls.load(Ordering::SeqCst)
    }
}

impl Transport for FlakyTransport {
    fn send(&self, _request: &PromptRequest) -> Result<String, TransportError> {
        self.calls.fetch_add(1, Ordering::SeqCst);
        match self.errors.lock().unwrap().pop() {
            Some(e) => Err(e),
            None => Ok(self.reply.clone()),
        }
    }
}
