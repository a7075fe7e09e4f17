//! On-disk task packs: one directory per task holding `task.md`,
//! `solution.kt`, `meta.json` and optionally `starter.kt`.

use std::collections::{HashMap, HashSet};
use std::fs;
use std::io;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::model::TaskSpec;
use crate::syntax::parse;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TaskMeta {
    pub id: String,
    pub project: String,
    #[serde(rename = "priorTasks")]
    pub prior_tasks: Vec<String>,
    pub topics: Vec<String>,
    #[serde(rename = "predefinedHints")]
    pub predefined_hints: Vec<String>,
}

#[derive(Debug, Error)]
pub enum LoadError {
    #[error("{path}: {source}")]
    Io { path: PathBuf, source: io::Error },
    #[error("{path}: invalid meta.json: {source}")]
    Meta { path: PathBuf, source: serde_json::Error },
}

fn read(path: &Path) -> Result<String, LoadError> {
    fs::read_to_string(path).map_err(|source| LoadError::Io { path: path.to_path_buf(), source })
}

pub fn load_task(dir: &Path) -> Result<TaskSpec, LoadError> {
    let meta_path = dir.join("meta.json");
    let meta: TaskMeta =
        serde_json::from_str(&read(&meta_path)?).map_err(|source| LoadError::Meta { path: meta_path, source })?;
    let starter_path = dir.join("starter.kt");
    let starter = if starter_path.exists() { Some(read(&starter_path)?) } else { None };
    Ok(TaskSpec {
        id: meta.id,
        description: read(&dir.join("task.md"))?,
        model_solution: read(&dir.join("solution.kt"))?,
        predefined_hints: meta.predefined_hints,
        theory_topics: meta.topics,
        project_id: meta.project,
        prior_task_ids: meta.prior_tasks,
        starter,
    })
}

/// Loads every subdirectory containing a `meta.json`, sorted by
/// directory name.
pub fn load_task_pack(root: &Path) -> Result<Vec<TaskSpec>, LoadError> {
    let io_err = |source| LoadError::Io { path: root.to_path_buf(), source };
    let mut dirs: Vec<PathBuf> = fs::read_dir(root)
        .map_err(io_err)?
        .filter_map(|e| e.ok().map(|e| e.path()))
        .filter(|p| p.join("meta.json").is_file())
        .collect();
    dirs.sort();
    dirs.iter().map(|d| load_task(d)).collect()
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum TaskIssue {
    DuplicateId,
    DanglingPriorTask { prior: String },
    UnparseableSolution { line: u32, column: u32, message: String },
    NoTopics,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TaskPackError {
    pub task_id: String,
    pub issue: TaskIssue,
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct ValidationReport {
    pub errors: Vec<TaskPackError>,
}

impl ValidationReport {
    pub fn accepted(&self) -> bool {
        self.errors.is_empty()
    }

    pub fn for_task<'a>(&'a self, id: &'a str) -> impl Iterator<Item = &'a TaskIssue> + 'a {
        self.errors.iter().filter(move |e| e.task_id == id).map(|e| &e.issue)
    }
}

pub fn validate_task_pack(pack: &[TaskSpec]) -> ValidationReport {
    let mut errors = Vec::new();
    let mut counts: HashMap<&str, usize> = HashMap::new();
    for t in pack {
        *counts.entry(t.id.as_str()).or_default() += 1;
    }
    let ids: HashSet<&str> = counts.keys().copied().collect();
    let mut reported_dup = HashSet::new();
    for t in pack {
        let err = |issue| TaskPackError { task_id: t.id.clone(), issue };
        if counts[t.id.as_str()] > 1 && reported_dup.insert(t.id.as_str()) {
            errors.push(err(TaskIssue::DuplicateId));
        }
        for p in &t.prior_task_ids {
            if !ids.contains(p.as_str()) {
                errors.push(err(TaskIssue::DanglingPriorTask { prior: p.clone() }));
            }
        }
        if let Err(e) = parse(&t.model_solution) {
            errors.push(err(TaskIssue::UnparseableSolution { line: e.line, column: e.column, message: e.message }));
        }
        if t.theory_topics.is_empty() {
            errors.push(err(TaskIssue::NoTopics));
        }
    }
    ValidationReport { errors }
}
