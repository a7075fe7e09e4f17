//! One hint request: subgoals, then code hint, then text hint.

use chrono::Utc;
use serde::{Deserialize, Serialize};
use uuid::Uuid;

use crate::diff::diff_modules;
use crate::gateway::{Gateway, GatewayError};
use crate::hint::{build_code_hint, inspection_hits, payload_comments, BuiltHint, Heuristic, HintError};
use crate::model::{HintBundle, StudentSnapshot, SubgoalPlan, TaskSpec};
use crate::prompt::{
    build_code_hint_prompt, build_subgoal_prompt, build_text_hint_prompt, parse_code_response, parse_subgoal_response,
    parse_text_response, PromptRequest, ResponseError, Stage,
};
use crate::syntax::{parse, SourceModule};

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "reason")]
pub enum NoHintReason {
    SyntaxError { line: u32, column: u32, message: String },
    ProviderFormat { stage: Stage, message: String },
    AlreadyConverged,
    InvariantViolation { message: String },
}

impl NoHintReason {
    pub fn name(&self) -> &'static str {
        match self {
            NoHintReason::SyntaxError { .. } => "SyntaxError",
            NoHintReason::ProviderFormat { .. } => "ProviderFormat",
            NoHintReason::AlreadyConverged => "AlreadyConverged",
            NoHintReason::InvariantViolation { .. } => "InvariantViolation",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "event")]
pub enum StageEvent {
    Scope { add: usize, change: usize },
    Prompt { stage: Stage, fingerprint: String, reask: bool },
    Reask { stage: Stage, error: String },
    SubgoalsFiltered { total: usize, kept: usize },
    Warning { stage: Stage, message: String },
    HeuristicApplied { heuristic: Heuristic },
    Inspection { rule: String },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "status")]
pub enum HintResult {
    Bundle(Box<HintBundle>),
    NoHint(NoHintReason),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PipelineOutcome {
    pub result: HintResult,
    pub diagnostics: Vec<StageEvent>,
}

impl PipelineOutcome {
    pub fn bundle(&self) -> Option<&HintBundle> {
        match &self.result {
            HintResult::Bundle(b) => Some(b),
            HintResult::NoHint(_) => None,
        }
    }

    pub fn no_hint(&self) -> Option<&NoHintReason> {
        match &self.result {
            HintResult::NoHint(r) => Some(r),
            HintResult::Bundle(_) => None,
        }
    }

    /// Stages in the order their first prompt was sent.
    pub fn stage_order(&self) -> Vec<Stage> {
        let mut out = Vec::new();
        for e in &self.diagnostics {
            if let StageEvent::Prompt { stage, .. } = e {
                if !out.contains(stage) {
                    out.push(*stage);
                }
            }
        }
        out
    }

    pub fn heuristic(&self) -> Option<Heuristic> {
        self.diagnostics.iter().find_map(|e| match e {
            StageEvent::HeuristicApplied { heuristic } => Some(*heuristic),
            _ => None,
        })
    }

    pub fn fingerprints(&self) -> Vec<&str> {
        self.diagnostics
            .iter()
            .filter_map(|e| match e {
                StageEvent::Prompt { fingerprint, .. } => Some(fingerprint.as_str()),
                _ => None,
            })
            .collect()
    }
}

struct Run<'a> {
    gateway: &'a Gateway,
    task_id: &'a str,
    diagnostics: Vec<StageEvent>,
}

enum Step<T> {
    Done(T),
    Stop(NoHintReason),
}

impl Run<'_> {
    fn send(&mut self, req: &PromptRequest, reask: bool) -> Result<String, GatewayError> {
        self.diagnostics.push(StageEvent::Prompt { stage: req.stage, fingerprint: req.fingerprint.clone(), reask });
        self.gateway.complete(self.task_id, req)
    }

    /// Sends `req`; on a reply `parse` rejects, sends the re-ask once.
    fn ask<T>(
        &mut self,
        req: PromptRequest,
        parse: impl Fn(&str) -> Result<T, ResponseError>,
    ) -> Result<Step<T>, GatewayError> {
        let reply = self.send(&req, false)?;
        let err = match parse(&reply) {
            Ok(v) => return Ok(Step::Done(v)),
            Err(e) => e,
        };
        self.diagnostics.push(StageEvent::Reask { stage: req.stage, error: err.to_string() });
        let reply = self.send(&req.reask(), true)?;
        Ok(match parse(&reply) {
            Ok(v) => Step::Done(v),
            Err(e) => Step::Stop(NoHintReason::ProviderFormat { stage: req.stage, message: e.to_string() }),
        })
    }
}

macro_rules! step {
    ($run:expr, $e:expr) => {
        match $e? {
            Step::Done(v) => v,
            Step::Stop(reason) => return Ok(PipelineOutcome { result: HintResult::NoHint(reason), diagnostics: $run.diagnostics }),
        }
    };
}

/// Runs the three stages for `snapshot`. Provider failures are errors;
/// everything else ends in a bundle or a reason for not giving one.
pub fn generate_hint(
    task: &TaskSpec,
    snapshot: &StudentSnapshot,
    gateway: &Gateway,
    session_id: &str,
) -> Result<PipelineOutcome, GatewayError> {
    let mut run = Run { gateway, task_id: &task.id, diagnostics: Vec::new() };
    let stop = |run: Run, reason| Ok(PipelineOutcome { result: HintResult::NoHint(reason), diagnostics: run.diagnostics });

    let student = match parse(&snapshot.code) {
        Ok(m) => m,
        Err(e) => {
            return stop(run, NoHintReason::SyntaxError { line: e.line, column: e.column, message: e.message });
        }
    };
    let model = match parse(&task.model_solution) {
        Ok(m) => m,
        Err(e) => {
            return stop(run, NoHintReason::InvariantViolation { message: format!("model solution does not parse: {e}") })
        }
    };
    let scope = crate::hint::compute_scope(&student, &model);
    run.diagnostics.push(StageEvent::Scope { add: scope.functions_to_add.len(), change: scope.functions_to_change.len() });
    if scope.is_empty() {
        return stop(run, NoHintReason::AlreadyConverged);
    }

    let req = build_subgoal_prompt(task, &snapshot.code, &student, snapshot.attempt);
    let plan: SubgoalPlan = step!(run, run.ask(req, |t| parse_subgoal_response(&task.id, t)));
    let filtered = plan.filtered();
    run.diagnostics.push(StageEvent::SubgoalsFiltered { total: plan.subgoals.len(), kept: filtered.subgoals.len() });
    if filtered.subgoals.is_empty() {
        return stop(run, NoHintReason::ProviderFormat { stage: Stage::Subgoals, message: "no code subgoals".into() });
    }

    let req = build_code_hint_prompt(&filtered, &snapshot.code, snapshot.test_errors.as_deref(), snapshot.attempt);
    let code = step!(run, run.ask(req, parse_code_response));
    for w in &code.warnings {
        run.diagnostics.push(StageEvent::Warning { stage: Stage::CodeHint, message: w.clone() });
    }
    let built = match build_code_hint(&snapshot.code, &student, &code.module, &model) {
        Ok(b) => b,
        Err(HintError::NoActionableChange) => return stop(run, NoHintReason::AlreadyConverged),
        Err(HintError::Render(e)) => {
            return stop(run, NoHintReason::InvariantViolation { message: format!("render failed: {e:?}") })
        }
    };
    run.diagnostics.push(StageEvent::HeuristicApplied { heuristic: built.heuristic });
    for h in &built.inspections {
        run.diagnostics.push(StageEvent::Inspection { rule: h.rule.id().to_string() });
    }
    if let Err(message) = check_invariants(&student, &built) {
        return stop(run, NoHintReason::InvariantViolation { message });
    }

    let req = build_text_hint_prompt(&built.code_hint, snapshot.attempt);
    let text_hint = step!(run, run.ask(req, |t| parse_text_response(t, &built.code_hint)));

    let bundle = HintBundle {
        hint_id: Uuid::new_v4().to_string(),
        session_id: session_id.to_string(),
        text_hint,
        code_hint: built.code_hint,
        subgoal_plan: filtered,
        created_at: Utc::now(),
    };
    Ok(PipelineOutcome { result: HintResult::Bundle(Box::new(bundle)), diagnostics: run.diagnostics })
}

/// Same request with the regeneration counter bumped.
pub fn regenerate_hint(
    task: &TaskSpec,
    snapshot: &StudentSnapshot,
    gateway: &Gateway,
    session_id: &str,
) -> Result<PipelineOutcome, GatewayError> {
    let next = StudentSnapshot { attempt: snapshot.attempt + 1, ..snapshot.clone() };
    generate_hint(task, &next, gateway, session_id)
}

/// Final gate on a built hint: parses, one change unit, inside scope, no
/// comments in the new code and nothing left for the inspections.
pub fn check_invariants(student: &SourceModule, built: &BuiltHint) -> Result<(), String> {
    let after = parse(&built.code_hint.after).map_err(|e| format!("hint does not parse: {e}"))?;
    let set = diff_modules(student, &after);
    if set.unit_count() != 1 {
        return Err(format!("hint has {} change units", set.unit_count()));
    }
    let key = &set.functions[0].function;
    if !built.scope.contains(key) {
        return Err(format!("hint changes {key}, which is out of scope"));
    }
    let unit = set.units().next().expect("one unit");
    if payload_comments(unit) > 0 {
        return Err("hint adds comments".into());
    }
    if inspection_hits(&after) > inspection_hits(student) {
        return Err("hint adds code the inspections would rewrite".into());
    }
    Ok(())
}
