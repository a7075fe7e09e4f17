//! Hint-size heuristics: narrow a function's change units to one step.

use serde::{Deserialize, Serialize};

use crate::diff::{ChangeUnit, ContainerRef, Edit, HeaderTarget, Item, UnitKind};
use crate::syntax::printer::{print_function, print_stmt};
use crate::syntax::{Block, Expr, FunctionDecl, PrintOptions, Stmt, StmtKind, WhenBranch};

pub const TODO_MESSAGE: &str = "Implement this function";

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Heuristic {
    AdditiveStatementIsolation,
    IntrinsicStructureModificationFocus,
    InternalBodyChangeDetection,
    ShortFunctionSubstitution,
    None,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Reduced {
    pub unit: ChangeUnit,
    pub heuristic: Heuristic,
}

pub fn todo_stmt() -> Stmt {
    Stmt::new(StmtKind::Expr(Expr::call("TODO", vec![Expr::str(TODO_MESSAGE)])))
}

fn todo_block() -> Block {
    Block::new(vec![todo_stmt()])
}

/// Keeps the header of a compound statement and replaces its body with
/// the placeholder. `else` parts are dropped; a `when` keeps only an
/// `else` branch.
pub fn stub_construct(s: &Stmt) -> Stmt {
    let kind = match &s.kind {
        StmtKind::If { cond, header_span, .. } => StmtKind::If {
            cond: cond.clone(),
            then_block: todo_block(),
            else_block: None,
            header_span: *header_span,
        },
        StmtKind::When { subject, header_span, .. } => StmtKind::When {
            subject: subject.clone(),
            branches: vec![WhenBranch {
                conditions: Vec::new(),
                body: todo_block(),
                span: Default::default(),
                cond_span: Default::default(),
                trivia: Default::default(),
            }],
            header_span: *header_span,
        },
        StmtKind::For { var, iterable, header_span, .. } => StmtKind::For {
            var: var.clone(),
            iterable: iterable.clone(),
            body: todo_block(),
            header_span: *header_span,
        },
        StmtKind::While { cond, header_span, .. } => {
            StmtKind::While { cond: cond.clone(), body: todo_block(), header_span: *header_span }
        }
        StmtKind::DoWhile { cond, header_span, .. } => {
            StmtKind::DoWhile { body: todo_block(), cond: cond.clone(), header_span: *header_span }
        }
        other => other.clone(),
    };
    Stmt { kind, span: s.span, trivia: s.trivia.clone() }
}

pub fn stub_function(f: &FunctionDecl) -> FunctionDecl {
    FunctionDecl { body: todo_block(), ..f.clone() }
}

const PLAIN: PrintOptions = PrintOptions { comments: false };

fn isolate_addition(u: &ChangeUnit) -> Option<ChangeUnit> {
    if u.kind != UnitKind::AddConstruct {
        return None;
    }
    let mut out = u.clone();
    match &mut out.edit {
        Edit::AddFunction { decl, .. } => {
            *decl = stub_function(decl);
            out.after = Some(print_function(decl, PLAIN).trim_end().to_string());
        }
        Edit::Insert { item: Item::Stmt(s), .. } if s.is_compound() => {
            *s = stub_construct(s);
            out.after = Some(print_stmt(s, PLAIN).trim_end().to_string());
        }
        _ => return None,
    }
    Some(out)
}

/// Block path of the list a unit edits, or of the statement whose header
/// it changes.
fn location(u: &ChangeUnit) -> Option<&[(usize, usize)]> {
    match &u.edit {
        Edit::Insert { container, .. } | Edit::Remove { container, .. } | Edit::Replace { container, .. } => {
            Some(match container {
                ContainerRef::Block(p) => p,
                ContainerRef::Branches(n) => &n.container,
            })
        }
        Edit::Header { target: HeaderTarget::Stmt(n), .. } | Edit::Header { target: HeaderTarget::Branch(n, _), .. } => {
            Some(&n.container)
        }
        _ => None,
    }
}

/// Whether `u` lies inside the construct whose header `h` changes.
fn header_contains(h: &ChangeUnit, u: &ChangeUnit) -> bool {
    if std::ptr::eq(h, u) || h.function != u.function {
        return false;
    }
    match &h.edit {
        Edit::Signature { .. } => location(u).is_some(),
        Edit::Header { target: HeaderTarget::Stmt(node), .. } => u.within(node),
        Edit::Header { target: HeaderTarget::Branch(node, i), .. } => {
            let body = node.child(*i);
            location(u).is_some_and(|p| p.starts_with(&body))
        }
        _ => false,
    }
}

fn focus_header(units: &[ChangeUnit]) -> Option<&ChangeUnit> {
    let first = units.first()?;
    units
        .iter()
        .filter(|h| h.kind == UnitKind::HeaderModification)
        .filter(|h| std::ptr::eq(*h, first) || header_contains(h, first))
        .filter(|h| units.iter().any(|u| header_contains(h, u)))
        .min_by_key(|h| h.anchor.len())
}

/// Header focus, then first-unit selection. Never introduces a
/// placeholder.
pub fn narrow(units: &[ChangeUnit]) -> Option<Reduced> {
    let first = units.first()?;
    if let Some(h) = focus_header(units) {
        return Some(Reduced { unit: h.clone(), heuristic: Heuristic::IntrinsicStructureModificationFocus });
    }
    let heuristic = if units.len() > 1 { Heuristic::InternalBodyChangeDetection } else { Heuristic::None };
    Some(Reduced { unit: first.clone(), heuristic })
}

/// Exactly one unit out of a function's units, or `None` for an empty
/// slice.
pub fn reduce_to_single_step(units: &[ChangeUnit]) -> Option<Reduced> {
    let first = units.first()?;
    if let Some(unit) = isolate_addition(first) {
        return Some(Reduced { unit, heuristic: Heuristic::AdditiveStatementIsolation });
    }
    narrow(units)
}

impl Heuristic {
    pub fn as_str(self) -> &'static str {
        match self {
            Heuristic::AdditiveStatementIsolation => "AdditiveStatementIsolation",
            Heuristic::IntrinsicStructureModificationFocus => "IntrinsicStructureModificationFocus",
            Heuristic::InternalBodyChangeDetection => "InternalBodyChangeDetection",
            Heuristic::ShortFunctionSubstitution => "ShortFunctionSubstitution",
            Heuristic::None => "None",
        }
    }
}

