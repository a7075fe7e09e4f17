//! Autofix inspections. Each rule rewrites one node; [`inspect_stmt`] and
//! friends repeat until no rule fires.

use serde::{Deserialize, Serialize};

use crate::syntax::visit::{walk_block, walk_expr, walk_function, walk_module, walk_stmt, VisitMut};
use crate::syntax::{BinaryOp, Block, Expr, ExprKind, FunctionDecl, SourceModule, Stmt, StmtKind, UnaryOp};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum InspectionRule {
    ComparisonToRange,
    EqualsTrue,
    EqualsFalse,
    NegatedEquality,
    IfReturnBoolean,
    EmptyElse,
}

impl InspectionRule {
    pub const ALL: [InspectionRule; 6] = [
        InspectionRule::ComparisonToRange,
        InspectionRule::EqualsTrue,
        InspectionRule::EqualsFalse,
        InspectionRule::NegatedEquality,
        InspectionRule::IfReturnBoolean,
        InspectionRule::EmptyElse,
    ];

    pub fn id(self) -> &'static str {
        match self {
            InspectionRule::ComparisonToRange => "comparison-to-range",
            InspectionRule::EqualsTrue => "equals-true",
            InspectionRule::EqualsFalse => "equals-false",
            InspectionRule::NegatedEquality => "negated-equality",
            InspectionRule::IfReturnBoolean => "if-return-boolean",
            InspectionRule::EmptyElse => "empty-else",
        }
    }

    pub fn description(self) -> &'static str {
        match self {
            InspectionRule::ComparisonToRange => "`x >= a && x <= b` can be `x in a..b`",
            InspectionRule::EqualsTrue => "`x == true` can be `x`",
            InspectionRule::EqualsFalse => "`x == false` can be `!x`",
            InspectionRule::NegatedEquality => "`!(a == b)` can be `a != b`",
            InspectionRule::IfReturnBoolean => "`if (c) return true else return false` can be `return c`",
            InspectionRule::EmptyElse => "empty `else` branch can be removed",
        }
    }

    /// One rewrite at the root of `e`, if the rule matches there.
    pub fn rewrite_expr(self, e: &Expr) -> Option<Expr> {
        match self {
            InspectionRule::ComparisonToRange => comparison_to_range(e),
            InspectionRule::EqualsTrue => compare_with_bool(e, true).cloned(),
            InspectionRule::EqualsFalse => compare_with_bool(e, false).map(|x| Expr::unary(UnaryOp::Not, x.clone())),
            InspectionRule::NegatedEquality => match &e.kind {
                ExprKind::Unary { op: UnaryOp::Not, operand } => match &operand.kind {
                    ExprKind::Binary { op: BinaryOp::Eq, lhs, rhs } => {
                        Some(Expr::binary(BinaryOp::Ne, (**lhs).clone(), (**rhs).clone()))
                    }
                    _ => None,
                },
                _ => None,
            },
            _ => None,
        }
    }

    /// One rewrite at statement `s`, keeping its span and comments.
    pub fn rewrite_stmt(self, s: &Stmt) -> Option<Stmt> {
        let StmtKind::If { cond, then_block, else_block, header_span } = &s.kind else { return None };
        match self {
            InspectionRule::IfReturnBoolean => {
                let else_block = else_block.as_ref()?;
                if returns_bool(then_block) == Some(true) && returns_bool(else_block) == Some(false) {
                    Some(Stmt { kind: StmtKind::Return(Some(cond.clone())), span: s.span, trivia: s.trivia.clone() })
                } else {
                    None
                }
            }
            InspectionRule::EmptyElse => match else_block {
                Some(b) if b.stmts.is_empty() => Some(Stmt {
                    kind: StmtKind::If {
                        cond: cond.clone(),
                        then_block: then_block.clone(),
                        else_block: None,
                        header_span: *header_span,
                    },
                    span: s.span,
                    trivia: s.trivia.clone(),
                }),
                _ => None,
            },
            _ => None,
        }
    }
}

fn returns_bool(b: &Block) -> Option<bool> {
    match b.stmts.as_slice() {
        [Stmt { kind: StmtKind::Return(Some(e)), .. }] => e.as_bool(),
        _ => None,
    }
}

/// `x == true` / `true == x` style comparisons; returns `x`.
fn compare_with_bool(e: &Expr, value: bool) -> Option<&Expr> {
    let ExprKind::Binary { op: BinaryOp::Eq, lhs, rhs } = &e.kind else { return None };
    if rhs.as_bool() == Some(value) && lhs.as_bool().is_none() {
        Some(lhs)
    } else if lhs.as_bool() == Some(value) && rhs.as_bool().is_none() {
        Some(rhs)
    } else {
        None
    }
}

fn pure(e: &Expr) -> bool {
    match &e.kind {
        ExprKind::Int(_) | ExprKind::Bool(_) | ExprKind::Str(_) | ExprKind::Name(_) => true,
        ExprKind::Unary { operand, .. } => pure(operand),
        ExprKind::Binary { lhs, rhs, .. } => pure(lhs) && pure(rhs),
        ExprKind::Member { receiver, .. } => pure(receiver),
        ExprKind::Call { .. } => false,
    }
}

/// `(subject, bound)` for `x >= a` or `a <= x`.
fn lower_bound(e: &Expr) -> Option<(&Expr, &Expr)> {
    match &e.kind {
        ExprKind::Binary { op: BinaryOp::Ge, lhs, rhs } => Some((lhs, rhs)),
        ExprKind::Binary { op: BinaryOp::Le, lhs, rhs } => Some((rhs, lhs)),
        _ => None,
    }
}

/// `(subject, bound)` for `x <= b` or `b >= x`.
fn upper_bound(e: &Expr) -> Option<(&Expr, &Expr)> {
    match &e.kind {
        ExprKind::Binary { op: BinaryOp::Le, lhs, rhs } => Some((lhs, rhs)),
        ExprKind::Binary { op: BinaryOp::Ge, lhs, rhs } => Some((rhs, lhs)),
        _ => None,
    }
}

fn comparison_to_range(e: &Expr) -> Option<Expr> {
    let ExprKind::Binary { op: BinaryOp::And, lhs, rhs } = &e.kind else { return None };
    let try_pair = |lo: &Expr, hi: &Expr| -> Option<Expr> {
        let (x1, a) = lower_bound(lo)?;
        let (x2, b) = upper_bound(hi)?;
        let subject_ok = matches!(x1.kind, ExprKind::Name(_)) && x1.normalized() == x2.normalized();
        if !subject_ok || !pure(a) || !pure(b) {
            return None;
        }
        let range = Expr::binary(BinaryOp::Range, a.clone(), b.clone());
        Some(Expr::binary(BinaryOp::In, x1.clone(), range))
    };
    try_pair(lhs, rhs).or_else(|| try_pair(rhs, lhs))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct InspectionHit {
    pub rule: InspectionRule,
}

#[derive(Default)]
struct Inspector {
    hits: Vec<InspectionHit>,
}

impl VisitMut for Inspector {
    fn expr(&mut self, e: &mut Expr) {
        for rule in InspectionRule::ALL {
            if let Some(new) = rule.rewrite_expr(e) {
                *e = new;
                self.hits.push(InspectionHit { rule });
                return;
            }
        }
    }

    fn stmt(&mut self, s: &mut Stmt) {
        for rule in InspectionRule::ALL {
            if let Some(new) = rule.rewrite_stmt(s) {
                *s = new;
                self.hits.push(InspectionHit { rule });
                return;
            }
        }
    }
}

const MAX_ROUNDS: usize = 32;

fn fixed_point(mut round: impl FnMut(&mut Inspector)) -> Vec<InspectionHit> {
    let mut all = Vec::new();
    for _ in 0..MAX_ROUNDS {
        let mut v = Inspector::default();
        round(&mut v);
        if v.hits.is_empty() {
            break;
        }
        all.extend(v.hits);
    }
    all
}

pub fn inspect_expr(e: &mut Expr) -> Vec<InspectionHit> {
    fixed_point(|v| walk_expr(v, e))
}

pub fn inspect_stmt(s: &mut Stmt) -> Vec<InspectionHit> {
    fixed_point(|v| walk_stmt(v, s))
}

pub fn inspect_block(b: &mut Block) -> Vec<InspectionHit> {
    fixed_point(|v| walk_block(v, b))
}

pub fn inspect_function(f: &mut FunctionDecl) -> Vec<InspectionHit> {
    fixed_point(|v| walk_function(v, f))
}

/// Whole-module variant: every rule applied until none fires.
pub fn apply_inspections(module: &SourceModule) -> SourceModule {
    let mut m = module.clone();
    fixed_point(|v| walk_module(v, &mut m));
    m
}
