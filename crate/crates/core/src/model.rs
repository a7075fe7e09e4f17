//! Shared domain types.

use chrono::{DateTime, Utc};
use serde::{Deserialize, Serialize};

use crate::diff::WireUnit;
use crate::syntax::FunctionKey;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TaskSpec {
    pub id: String,
    pub description: String,
    pub model_solution: String,
    pub predefined_hints: Vec<String>,
    pub theory_topics: Vec<String>,
    pub project_id: String,
    pub prior_task_ids: Vec<String>,
    /// Code a fresh session starts from. Empty when absent.
    #[serde(default)]
    pub starter: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct StudentSnapshot {
    pub task_id: String,
    pub code: String,
    pub test_errors: Option<String>,
    /// Regeneration counter for unchanged code.
    pub attempt: u32,
}

impl StudentSnapshot {
    pub fn new(task_id: impl Into<String>, code: impl Into<String>) -> Self {
        Self { task_id: task_id.into(), code: code.into(), test_errors: None, attempt: 0 }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum SubgoalKind {
    Code,
    NoCode,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Subgoal {
    pub index: usize,
    pub text: String,
    pub kind: SubgoalKind,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SubgoalPlan {
    pub task_id: String,
    pub subgoals: Vec<Subgoal>,
    pub raw_response: String,
}

impl SubgoalPlan {
    /// Keeps code subgoals only. Indices are left as in the raw plan.
    pub fn filtered(&self) -> SubgoalPlan {
        SubgoalPlan {
            task_id: self.task_id.clone(),
            subgoals: self.subgoals.iter().filter(|s| s.kind == SubgoalKind::Code).cloned().collect(),
            raw_response: self.raw_response.clone(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Provenance {
    LlmGenerated,
    ModelSolutionSubstituted,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CodeHint {
    pub target_function: FunctionKey,
    pub before: String,
    pub after: String,
    pub retained_unit: WireUnit,
    pub provenance: Provenance,
}

/// 1-based inclusive line range.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct LineSpan {
    pub start: usize,
    pub end: usize,
}

impl LineSpan {
    pub fn line(n: usize) -> Self {
        Self { start: n, end: n }
    }

    pub fn contains(&self, line: usize) -> bool {
        self.start <= line && line <= self.end
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TextHint {
    pub text: String,
    pub highlight: LineSpan,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct HintBundle {
    pub hint_id: String,
    pub session_id: String,
    pub text_hint: TextHint,
    pub code_hint: CodeHint,
    pub subgoal_plan: SubgoalPlan,
    pub created_at: DateTime<Utc>,
}

// created_at is not part of a bundle's identity
impl PartialEq for HintBundle {
    fn eq(&self, other: &Self) -> bool {
        self.hint_id == other.hint_id
            && self.session_id == other.session_id
            && self.text_hint == other.text_hint
            && self.code_hint == other.code_hint
            && self.subgoal_plan == other.subgoal_plan
    }
}
