//! Post-processing of a proposed program into a single-step code hint:
//! scope restriction, short-function substitution, size heuristics,
//! inspections and comment removal.

mod heuristics;
mod inspections;
mod render;
mod scope;

pub use heuristics::{narrow, reduce_to_single_step, stub_construct, stub_function, todo_stmt, Heuristic, Reduced, TODO_MESSAGE};
pub use inspections::{
    apply_inspections, inspect_block, inspect_expr, inspect_function, inspect_stmt, InspectionHit, InspectionRule,
};
pub use render::{highlight, render, RenderError, Rendered};
pub use scope::{compute_scope, filter_to_scope, ScopeSet};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::diff::{diff_function, diff_modules, ChangeUnit, Edit, HeaderEdit, Item, UnitKind, WireUnit};
use crate::model::{CodeHint, LineSpan, Provenance};
use crate::syntax::visit::{
    count_comments_function, count_comments_stmt, strip_comments_block, strip_comments_function, strip_comments_stmt,
};
use crate::syntax::{FunctionDecl, FunctionKey, SourceModule};

/// Largest model body (non-blank, comment-free lines) that is used
/// verbatim instead of the proposed code.
pub const SHORT_FUNCTION_LINES: usize = 3;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum HintError {
    #[error("no actionable change in scope")]
    NoActionableChange,
    #[error("could not render the hint: {0:?}")]
    Render(RenderError),
}

/// A code hint plus what happened while building it.
#[derive(Debug, Clone, PartialEq)]
pub struct BuiltHint {
    pub code_hint: CodeHint,
    /// The single unit between `before` and `after`, recomputed.
    pub unit: ChangeUnit,
    pub heuristic: Heuristic,
    pub inspections: Vec<InspectionHit>,
    pub highlight: LineSpan,
    pub scope: ScopeSet,
    /// Units the proposal had in the target function before narrowing.
    pub proposed_units: usize,
    pub spliced: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ShortBody {
    pub function: FunctionDecl,
    pub provenance: Provenance,
}

/// The model function, comments removed, when its body is short enough.
pub fn short_function_substitute(target: &FunctionKey, model: &SourceModule) -> Result<Option<ShortBody>, HintError> {
    let f = model.function(target).ok_or(HintError::NoActionableChange)?;
    if f.body_line_count() > SHORT_FUNCTION_LINES {
        return Ok(None);
    }
    let mut function = f.clone();
    strip_comments_function(&mut function);
    Ok(Some(ShortBody { function, provenance: Provenance::ModelSolutionSubstituted }))
}

/// Inspections and comment removal on the unit's payload only.
fn clean_payload(unit: &mut ChangeUnit, inspect: bool) -> Vec<InspectionHit> {
    let mut hits = Vec::new();
    match &mut unit.edit {
        Edit::AddFunction { decl, .. } => {
            strip_comments_function(decl);
            if inspect {
                hits = inspect_function(decl);
            }
        }
        Edit::Insert { item, .. } | Edit::Replace { item, .. } => match item {
            Item::Stmt(s) => {
                strip_comments_stmt(s);
                if inspect {
                    hits = inspect_stmt(s);
                }
            }
            Item::Branch(b) => {
                b.trivia = Default::default();
                strip_comments_block(&mut b.body);
                if inspect {
                    for c in &mut b.conditions {
                        hits.extend(inspect_expr(c));
                    }
                    hits.extend(inspect_block(&mut b.body));
                }
            }
        },
        Edit::Header { header, .. } if inspect => match header {
            HeaderEdit::Cond(e) | HeaderEdit::Subject(e) => hits = inspect_expr(e),
            HeaderEdit::ForHeader { iterable, .. } => hits = inspect_expr(iterable),
            HeaderEdit::BranchConditions(cs) => {
                for c in cs {
                    hits.extend(inspect_expr(c));
                }
            }
        },
        _ => {}
    }
    hits
}

struct Candidate {
    rendered: Rendered,
    unit: ChangeUnit,
    hits: Vec<InspectionHit>,
}

/// Renders the unit with its payload cleaned. When the cleaned payload no
/// longer amounts to a single step against the student's code, the
/// resulting units are narrowed again.
fn finish(src: &str, student: &SourceModule, unit: &ChangeUnit) -> Result<Candidate, HintError> {
    let mut unit = unit.clone();
    let mut hits = Vec::new();
    for _ in 0..4 {
        hits.extend(clean_payload(&mut unit, true));
        let rendered = render(src, student, &unit).map_err(HintError::Render)?;
        let mut units: Vec<ChangeUnit> = diff_modules(student, &rendered.module).units().cloned().collect();
        match units.len() {
            0 => return Err(HintError::NoActionableChange),
            1 => return Ok(Candidate { rendered, unit: units.remove(0), hits }),
            _ => unit = narrow(&units).ok_or(HintError::NoActionableChange)?.unit,
        }
    }
    Err(HintError::NoActionableChange)
}

/// Comments carried by the unit's new code.
pub fn payload_comments(unit: &ChangeUnit) -> usize {
    match &unit.edit {
        Edit::AddFunction { decl, .. } => count_comments_function(decl),
        Edit::Insert { item, .. } | Edit::Replace { item, .. } => match item {
            Item::Stmt(s) => count_comments_stmt(s),
            Item::Branch(b) => {
                b.trivia.leading.len()
                    + b.trivia.trailing.len()
                    + b.body.dangling.len()
                    + b.body.stmts.iter().map(count_comments_stmt).sum::<usize>()
            }
        },
        _ => 0,
    }
}

/// Number of inspection rewrites the whole module would receive.
pub fn inspection_hits(module: &SourceModule) -> usize {
    let mut m = module.clone();
    let mut n: usize = m.functions.iter_mut().map(|f| inspect_function(f).len()).sum();
    for s in &mut m.statements {
        n += inspect_stmt(s).len();
    }
    n
}

/// `proposal` with the functions the student already has put back in the
/// student's order; new functions stay after the one they followed.
pub fn follow_layout(student: &SourceModule, proposal: &SourceModule) -> SourceModule {
    let mut used = vec![false; student.functions.len()];
    let mut last = 0;
    let mut keyed: Vec<(usize, usize, FunctionDecl)> = Vec::with_capacity(proposal.functions.len());
    for (seq, f) in proposal.functions.iter().enumerate() {
        let key = f.key();
        let hit = student.functions.iter().enumerate().position(|(i, g)| !used[i] && g.key() == key);
        let rank = match hit {
            Some(i) => {
                used[i] = true;
                last = 2 * i + 1;
                last
            }
            None => last + 1,
        };
        keyed.push((rank, seq, f.clone()));
    }
    keyed.sort_by_key(|(rank, seq, _)| (*rank, *seq));
    SourceModule { functions: keyed.into_iter().map(|(_, _, f)| f).collect(), ..proposal.clone() }
}

/// Full post-processing of a proposed program `llm` against the student's
/// code (`src`, parsed as `student`) and the model solution.
pub fn build_code_hint(
    src: &str,
    student: &SourceModule,
    llm: &SourceModule,
    model: &SourceModule,
) -> Result<BuiltHint, HintError> {
    let scope = compute_scope(student, model);
    let llm = follow_layout(student, llm);
    let filtered = filter_to_scope(&diff_modules(student, &llm), &scope);
    let Some(target) = filtered.functions.first() else { return Err(HintError::NoActionableChange) };
    let key = target.function.clone();
    let proposed_units = target.units.len();

    let short = if key.is_top_level() { None } else { short_function_substitute(&key, model)? };
    let (reduced, provenance) = match short {
        Some(body) if scope.functions_to_add.contains(&key) => {
            let mut unit = target
                .units
                .iter()
                .find(|u| u.kind == UnitKind::AddConstruct && matches!(u.edit, Edit::AddFunction { .. }))
                .cloned()
                .ok_or(HintError::NoActionableChange)?;
            if let Edit::AddFunction { decl, .. } = &mut unit.edit {
                *decl = body.function;
            }
            (Reduced { unit, heuristic: Heuristic::ShortFunctionSubstitution }, body.provenance)
        }
        Some(body) => {
            let current = student.function(&key).ok_or(HintError::NoActionableChange)?;
            let units = diff_function(Some(current), Some(&body.function));
            let reduced = narrow(&units).ok_or(HintError::NoActionableChange)?;
            (Reduced { unit: reduced.unit, heuristic: Heuristic::ShortFunctionSubstitution }, body.provenance)
        }
        None => (reduce_to_single_step(&target.units).ok_or(HintError::NoActionableChange)?, Provenance::LlmGenerated),
    };

    let done = finish(src, student, &reduced.unit)?;
    let highlight = highlight(src, student, &done.unit);
    let code_hint = CodeHint {
        target_function: key,
        before: src.to_string(),
        after: done.rendered.after,
        retained_unit: WireUnit::from(&done.unit),
        provenance,
    };
    Ok(BuiltHint {
        code_hint,
        unit: done.unit,
        heuristic: reduced.heuristic,
        inspections: done.hits,
        highlight,
        scope,
        proposed_units,
        spliced: done.rendered.spliced,
    })
}

#[cfg(test)]
mod tests;
