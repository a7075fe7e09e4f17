//! Batch scoring of generated hints.

use std::collections::BTreeMap;
use std::fs;
use std::path::{Path, PathBuf};

use chrono::{DateTime, Utc};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use similar::{DiffOp, TextDiff};

use crate::diff::{diff_modules, WireUnit};
use crate::gateway::{Gateway, GatewayError};
use crate::hint::{inspection_hits, Heuristic};
use crate::model::{HintBundle, StudentSnapshot, SubgoalKind, TaskSpec};
use crate::pipeline::{generate_hint, HintResult, NoHintReason, StageEvent};
use crate::syntax::parse;
use crate::text::{split_sentences, word_count};

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct LineCounts {
    pub added: usize,
    pub changed: usize,
    pub deleted: usize,
}

fn content_lines(text: &str) -> Vec<&str> {
    text.lines().map(str::trim).filter(|l| !l.is_empty()).collect()
}

/// Line diff over trimmed, non-blank lines. In a replaced run the
/// overlapping lines count as changed and the rest as added or deleted.
pub fn line_counts(before: &str, after: &str) -> LineCounts {
    line_diff(before, after).0
}

/// Counts plus the new-side lines of added and changed runs.
fn line_diff<'a>(before: &str, after: &'a str) -> (LineCounts, Vec<&'a str>) {
    let old = content_lines(before);
    let new = content_lines(after);
    let diff = TextDiff::from_slices(&old, &new);
    let mut c = LineCounts::default();
    let mut fresh = Vec::new();
    for op in diff.ops() {
        match *op {
            DiffOp::Equal { .. } => {}
            DiffOp::Delete { old_len, .. } => c.deleted += old_len,
            DiffOp::Insert { new_index, new_len, .. } => {
                c.added += new_len;
                fresh.extend_from_slice(&new[new_index..new_index + new_len]);
            }
            DiffOp::Replace { old_len, new_index, new_len, .. } => {
                let both = old_len.min(new_len);
                c.changed += both;
                c.added += new_len - both;
                c.deleted += old_len - both;
                fresh.extend_from_slice(&new[new_index..new_index + new_len]);
            }
        }
    }
    (c, fresh)
}

/// Counts implied by a serialized change unit's fragments.
pub fn unit_line_counts(unit: &WireUnit) -> LineCounts {
    line_counts(unit.before.as_deref().unwrap_or(""), unit.after.as_deref().unwrap_or(""))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HintMetrics {
    pub subgoal_amount: usize,
    /// A no-code subgoal survived filtering.
    pub no_code_leak: bool,
    pub text_words: usize,
    pub text_sentences: usize,
    pub code_added: usize,
    pub code_changed: usize,
    pub code_deleted: usize,
    /// Share of added or changed lines already in the student's code.
    pub intersection_ratio: Option<f64>,
    pub parses: bool,
    pub inspection_clean: bool,
    pub single_step: bool,
    /// Line counts from the text diff match those of the retained unit.
    pub diff_consistent: bool,
}

impl HintMetrics {
    pub fn violates_invariants(&self) -> bool {
        self.no_code_leak || !self.parses || !self.inspection_clean || !self.single_step
    }
}

pub fn score_hint(bundle: &HintBundle, snapshot: &StudentSnapshot) -> HintMetrics {
    let plan = &bundle.subgoal_plan;
    let code = &bundle.code_hint;
    let (counts, fresh) = line_diff(&code.before, &code.after);
    let existing: Vec<&str> = content_lines(&snapshot.code);
    let intersection_ratio = (!fresh.is_empty())
        .then(|| fresh.iter().filter(|l| existing.contains(l)).count() as f64 / fresh.len() as f64);
    let before = parse(&code.before).ok();
    let after = parse(&code.after).ok();
    let (single_step, inspection_clean) = match (&before, &after) {
        (Some(b), Some(a)) => (diff_modules(b, a).unit_count() == 1, inspection_hits(a) <= inspection_hits(b)),
        _ => (false, false),
    };
    HintMetrics {
        subgoal_amount: plan.subgoals.len(),
        no_code_leak: plan.subgoals.iter().any(|s| s.kind == SubgoalKind::NoCode),
        text_words: word_count(&bundle.text_hint.text),
        text_sentences: split_sentences(&bundle.text_hint.text).len(),
        code_added: counts.added,
        code_changed: counts.changed,
        code_deleted: counts.deleted,
        intersection_ratio,
        parses: after.is_some(),
        inspection_clean,
        single_step,
        diff_consistent: unit_line_counts(&code.retained_unit) == counts,
    }
}

/// A snapshot file plus its id `{task}/{name}`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct NamedSnapshot {
    pub id: String,
    pub snapshot: StudentSnapshot,
}

/// Reads `{root}/{task}/{name}.kt` with optional `{name}.errors.txt`.
pub fn load_snapshots(root: &Path) -> std::io::Result<Vec<NamedSnapshot>> {
    let mut out = Vec::new();
    let mut tasks: Vec<PathBuf> = fs::read_dir(root)?.filter_map(|e| e.ok().map(|e| e.path())).filter(|p| p.is_dir()).collect();
    tasks.sort();
    for dir in tasks {
        let task_id = dir.file_name().map(|n| n.to_string_lossy().into_owned()).unwrap_or_default();
        let mut files: Vec<PathBuf> =
            fs::read_dir(&dir)?.filter_map(|e| e.ok().map(|e| e.path())).filter(|p| p.extension().is_some_and(|e| e == "kt")).collect();
        files.sort();
        for f in files {
            let name = f.file_stem().map(|n| n.to_string_lossy().into_owned()).unwrap_or_default();
            let errors = dir.join(format!("{name}.errors.txt"));
            let snapshot = StudentSnapshot {
                task_id: task_id.clone(),
                code: fs::read_to_string(&f)?,
                test_errors: if errors.exists() { Some(fs::read_to_string(&errors)?) } else { None },
                attempt: 0,
            };
            out.push(NamedSnapshot { id: format!("{task_id}/{name}"), snapshot });
        }
    }
    Ok(out)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReportRow {
    pub snapshot_id: String,
    pub task_id: String,
    /// `Hint`, a no-hint reason name, or `Error`.
    pub outcome: String,
    pub detail: Option<String>,
    pub heuristic: Option<Heuristic>,
    pub fingerprints: Vec<String>,
    pub text_hint: Option<String>,
    pub code_after: Option<String>,
    pub metrics: Option<HintMetrics>,
    /// Fingerprint a replay run had no fixture for.
    pub missing_fingerprint: Option<String>,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Summary {
    pub mean: f64,
    pub median: f64,
}

fn summarize(mut xs: Vec<f64>) -> Option<Summary> {
    if xs.is_empty() {
        return None;
    }
    xs.sort_by(f64::total_cmp);
    let n = xs.len();
    let mean = xs.iter().sum::<f64>() / n as f64;
    let median = if n % 2 == 1 { xs[n / 2] } else { (xs[n / 2 - 1] + xs[n / 2]) / 2.0 };
    Some(Summary { mean, median })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Aggregate {
    pub scored: usize,
    pub metrics: BTreeMap<String, Option<Summary>>,
    pub invariant_violations: usize,
    pub no_hint: BTreeMap<String, usize>,
    pub errors: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EvaluationReport {
    pub generated_at: DateTime<Utc>,
    pub rows: Vec<ReportRow>,
    pub aggregate: Aggregate,
}

impl EvaluationReport {
    pub fn missing_fingerprints(&self) -> Vec<&str> {
        self.rows.iter().filter_map(|r| r.missing_fingerprint.as_deref()).collect()
    }
}

fn evaluate_one(tasks: &[TaskSpec], named: &NamedSnapshot, gateway: &Gateway) -> ReportRow {
    let snap = &named.snapshot;
    let mut row = ReportRow {
        snapshot_id: named.id.clone(),
        task_id: snap.task_id.clone(),
        outcome: "Error".into(),
        detail: None,
        heuristic: None,
        fingerprints: Vec::new(),
        text_hint: None,
        code_after: None,
        metrics: None,
        missing_fingerprint: None,
    };
    let Some(task) = tasks.iter().find(|t| t.id == snap.task_id) else {
        row.detail = Some(format!("unknown task {}", snap.task_id));
        return row;
    };
    let outcome = match generate_hint(task, snap, gateway, "eval") {
        Ok(o) => o,
        Err(e) => {
            if let GatewayError::FixtureMiss { fingerprint, .. } = &e {
                row.missing_fingerprint = Some(fingerprint.clone());
            }
            row.detail = Some(e.to_string());
            return row;
        }
    };
    row.heuristic = outcome.heuristic();
    row.fingerprints = outcome.fingerprints().into_iter().map(String::from).collect();
    match &outcome.result {
        HintResult::Bundle(b) => {
            row.outcome = "Hint".into();
            row.text_hint = Some(b.text_hint.text.clone());
            row.code_after = Some(b.code_hint.after.clone());
            row.metrics = Some(score_hint(b, snap));
        }
        HintResult::NoHint(reason) => {
            row.outcome = reason.name().into();
            row.detail = match reason {
                NoHintReason::AlreadyConverged => None,
                NoHintReason::SyntaxError { line, column, message } => Some(format!("{line}:{column}: {message}")),
                NoHintReason::ProviderFormat { stage, message } => Some(format!("{}: {message}", stage.as_str())),
                NoHintReason::InvariantViolation { message } => Some(message.clone()),
            };
        }
    }
    if let Some(w) = outcome.diagnostics.iter().find_map(|e| match e {
        StageEvent::Warning { message, .. } => Some(message.clone()),
        _ => None,
    }) {
        row.detail.get_or_insert(w);
    }
    row
}

pub fn aggregate(rows: &[ReportRow]) -> Aggregate {
    let scored: Vec<&HintMetrics> = rows.iter().filter_map(|r| r.metrics.as_ref()).collect();
    type Column = (&'static str, fn(&HintMetrics) -> Option<f64>);
    let columns: [Column; 11] = [
        ("subgoal_amount", |m| Some(m.subgoal_amount as f64)),
        ("no_code_leak", |m| Some(if m.no_code_leak { 1.0 } else { 0.0 })),
        ("text_words", |m| Some(m.text_words as f64)),
        ("text_sentences", |m| Some(m.text_sentences as f64)),
        ("code_added", |m| Some(m.code_added as f64)),
        ("code_changed", |m| Some(m.code_changed as f64)),
        ("code_deleted", |m| Some(m.code_deleted as f64)),
        ("intersection_ratio", |m| m.intersection_ratio),
        ("parses", |m| Some(if m.parses { 1.0 } else { 0.0 })),
        ("inspection_clean", |m| Some(if m.inspection_clean { 1.0 } else { 0.0 })),
        ("single_step", |m| Some(if m.single_step { 1.0 } else { 0.0 })),
    ];
    let metrics = columns
        .iter()
        .map(|(name, get)| (name.to_string(), summarize(scored.iter().filter_map(|m| get(m)).collect())))
        .collect();
    let mut no_hint = BTreeMap::new();
    for r in rows.iter().filter(|r| r.outcome != "Hint" && r.outcome != "Error") {
        *no_hint.entry(r.outcome.clone()).or_insert(0) += 1;
    }
    let invariant_violations = scored.iter().filter(|m| m.violates_invariants()).count()
        + rows.iter().filter(|r| r.outcome == "InvariantViolation").count();
    Aggregate {
        scored: scored.len(),
        metrics,
        invariant_violations,
        no_hint,
        errors: rows.iter().filter(|r| r.outcome == "Error").count(),
    }
}

/// Runs the pipeline on every snapshot in parallel; rows keep input order.
pub fn run_corpus(tasks: &[TaskSpec], snapshots: &[NamedSnapshot], gateway: &Gateway) -> EvaluationReport {
    let rows: Vec<ReportRow> = snapshots.par_iter().map(|s| evaluate_one(tasks, s, gateway)).collect();
    let aggregate = aggregate(&rows);
    EvaluationReport { generated_at: Utc::now(), rows, aggregate }
}

#[derive(Serialize)]
struct CsvRow<'a> {
    snapshot_id: &'a str,
    task_id: &'a str,
    outcome: &'a str,
    subgoal_amount: Option<usize>,
    no_code_leak: Option<bool>,
    text_words: Option<usize>,
    text_sentences: Option<usize>,
    code_added: Option<usize>,
    code_changed: Option<usize>,
    code_deleted: Option<usize>,
    intersection_ratio: Option<f64>,
    parses: Option<bool>,
    inspection_clean: Option<bool>,
    single_step: Option<bool>,
}

pub fn report_csv(report: &EvaluationReport) -> String {
    let mut w = csv::Writer::from_writer(Vec::new());
    for r in &report.rows {
        let m = r.metrics.as_ref();
        w.serialize(CsvRow {
            snapshot_id: &r.snapshot_id,
            task_id: &r.task_id,
            outcome: &r.outcome,
            subgoal_amount: m.map(|m| m.subgoal_amount),
            no_code_leak: m.map(|m| m.no_code_leak),
            text_words: m.map(|m| m.text_words),
            text_sentences: m.map(|m| m.text_sentences),
            code_added: m.map(|m| m.code_added),
            code_changed: m.map(|m| m.code_changed),
            code_deleted: m.map(|m| m.code_deleted),
            intersection_ratio: m.and_then(|m| m.intersection_ratio),
            parses: m.map(|m| m.parses),
            inspection_clean: m.map(|m| m.inspection_clean),
            single_step: m.map(|m| m.single_step),
        })
        .expect("csv rows serialize");
    }
    // An empty report still gets a header line.
    if report.rows.is_empty() {
        return "snapshot_id,task_id,outcome,subgoal_amount,no_code_leak,text_words,text_sentences,code_added,code_changed,code_deleted,intersection_ratio,parses,inspection_clean,single_step\n".into();
    }
    String::from_utf8(w.into_inner().expect("in-memory writer")).expect("csv is utf-8")
}

/// Writes `report.json` and `report.csv` into `dir`.
pub fn write_report(report: &EvaluationReport, dir: &Path) -> std::io::Result<()> {
    fs::create_dir_all(dir)?;
    let json = serde_json::to_string_pretty(report).expect("reports serialize");
    fs::write(dir.join("report.json"), format!("{json}\n"))?;
    fs::write(dir.join("report.csv"), report_csv(report))
}
