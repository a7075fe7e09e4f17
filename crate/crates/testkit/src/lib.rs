//! Test support: scripted transports, an evaluator oracle, random edit
//! scripts and the shipped corpus.

pub mod edits;
pub mod exprs;
pub mod golden;
pub mod oracle;
pub mod transport;
pub mod triples;

use std::fs;
use std::path::{Path, PathBuf};
use std::sync::Arc;

use stepwise_core::gateway::{Gateway, GatewayError, Mode, ProviderConfig};
use stepwise_core::model::TaskSpec;
use stepwise_core::pipeline::{generate_hint, PipelineOutcome};
use stepwise_core::prompt::Stage;
use stepwise_core::eval::NamedSnapshot;

pub use transport::{CountingTransport, FlakyTransport, ScriptedTransport};

pub fn workspace_root() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../..").canonicalize().expect("workspace root")
}

pub fn corpus_dir() -> PathBuf {
    workspace_root().join("corpus")
}

pub fn course_dir() -> PathBuf {
    corpus_dir().join("course")
}

pub fn snapshots_dir() -> PathBuf {
    corpus_dir().join("snapshots")
}

pub fn fixtures_dir() -> PathBuf {
    corpus_dir().join("fixtures")
}

pub fn responses_dir() -> PathBuf {
    corpus_dir().join("responses")
}

pub fn load_course() -> Vec<TaskSpec> {
    stepwise_core::taskpack::load_task_pack(&course_dir()).expect("shipped course loads")
}

pub fn load_corpus_snapshots() -> Vec<NamedSnapshot> {
    stepwise_core::eval::load_snapshots(&snapshots_dir()).expect("shipped snapshots load")
}

pub fn replay_gateway() -> Gateway {
    Gateway::new(ProviderConfig::replay(fixtures_dir())).expect("replay gateway")
}

/// Authored replies for one snapshot: `{name}.{stage}.txt`, and for a
/// reply that should follow a re-ask, `{name}.{stage}.2.txt`.
pub fn scripted_for(responses: &Path, snapshot_id: &str) -> Option<ScriptedTransport> {
    let base = responses.join(snapshot_id);
    let mut t = ScriptedTransport::new();
    let mut any = false;
    for (stage, suffix) in [(Stage::Subgoals, "subgoals"), (Stage::CodeHint, "code"), (Stage::TextHint, "text")] {
        for extra in ["", ".2"] {
            let path = base.with_file_name(format!(
                "{}.{suffix}{extra}.txt",
                base.file_name().expect("snapshot name").to_string_lossy()
            ));
            if let Ok(text) = fs::read_to_string(&path) {
                t = t.with(stage, text);
                any = true;
            }
        }
    }
    any.then_some(t)
}

/// Records fixtures for every snapshot that has authored replies, for
/// attempts `0..attempts`. Returns the outcomes in snapshot order.
pub fn record_fixtures(
    tasks: &[TaskSpec],
    snapshots: &[NamedSnapshot],
    responses: &Path,
    out: &Path,
    attempts: u32,
) -> Result<Vec<(String, PipelineOutcome)>, GatewayError> {
    let mut outcomes = Vec::new();
    for named in snapshots {
        let Some(task) = tasks.iter().find(|t| t.id == named.snapshot.task_id) else { continue };
        for attempt in 0..attempts {
            let Some(script) = scripted_for(responses, &named.id) else { continue };
            let config = ProviderConfig {
                mode: Mode::Record,
                endpoint: Some("scripted://".into()),
                fixture_path: Some(out.to_path_buf()),
                ..ProviderConfig::default()
            };
            let gateway = Gateway::with_transport(config, Arc::new(script))?;
            let snap = stepwise_core::model::StudentSnapshot { attempt, ..named.snapshot.clone() };
            outcomes.push((named.id.clone(), generate_hint(task, &snap, &gateway, "record")?));
        }
    }
    Ok(outcomes)
}
