//! Mutable traversal helpers over the AST.

use super::ast::*;

/// Callbacks for a depth-first mutable walk. Children are visited before
/// the `*_post` hook of their parent fires.
pub trait VisitMut {
    fn block(&mut self, _block: &mut Block) {}
    fn stmt(&mut self, _stmt: &mut Stmt) {}
    fn branch(&mut self, _branch: &mut WhenBranch) {}
    fn expr(&mut self, _expr: &mut Expr) {}
    fn function(&mut self, _func: &mut FunctionDecl) {}
}

pub fn walk_module<V: VisitMut>(v: &mut V, m: &mut SourceModule) {
    for f in &mut m.functions {
        walk_function(v, f);
    }
    for s in &mut m.statements {
        walk_stmt(v, s);
    }
}

pub fn walk_function<V: VisitMut>(v: &mut V, f: &mut FunctionDecl) {
    walk_block(v, &mut f.body);
    v.function(f);
}

pub fn walk_block<V: VisitMut>(v: &mut V, b: &mut Block) {
    for s in &mut b.stmts {
        walk_stmt(v, s);
    }
    v.block(b);
}

pub fn walk_stmt<V: VisitMut>(v: &mut V, s: &mut Stmt) {
    match &mut s.kind {
        StmtKind::VarDecl { init, .. } => walk_expr(v, init),
        StmtKind::Assign { value, .. } => walk_expr(v, value),
        StmtKind::Expr(e) => walk_expr(v, e),
        StmtKind::Return(e) => {
            if let Some(e) = e {
                walk_expr(v, e)
            }
        }
        StmtKind::If { cond, then_block, else_block, .. } => {
            walk_expr(v, cond);
            walk_block(v, then_block);
            if let Some(b) = else_block {
                walk_block(v, b);
            }
        }
        StmtKind::When { subject, branches, .. } => {
            if let Some(e) = subject {
                walk_expr(v, e);
            }
            for br in branches {
                for c in &mut br.conditions {
                    walk_expr(v, c);
                }
                walk_block(v, &mut br.body);
                v.branch(br);
            }
        }
        StmtKind::For { iterable, body, .. } => {
            walk_expr(v, iterable);
            walk_block(v, body);
        }
        StmtKind::While { cond, body, .. } => {
            walk_expr(v, cond);
            walk_block(v, body);
        }
        StmtKind::DoWhile { body, cond, .. } => {
            walk_block(v, body);
            walk_expr(v, cond);
        }
        StmtKind::Block(b) => walk_block(v, b),
    }
    v.stmt(s);
}

pub fn walk_expr<V: VisitMut>(v: &mut V, e: &mut Expr) {
    match &mut e.kind {
        ExprKind::Call { receiver, args, .. } => {
            if let Some(r) = receiver {
                walk_expr(v, r);
            }
            for a in args {
                walk_expr(v, a);
            }
        }
        ExprKind::Member { receiver, .. } => walk_expr(v, receiver),
        ExprKind::Binary { lhs, rhs, .. } => {
            walk_expr(v, lhs);
            walk_expr(v, rhs);
        }
        ExprKind::Unary { operand, .. } => walk_expr(v, operand),
        ExprKind::Int(_) | ExprKind::Bool(_) | ExprKind::Str(_) | ExprKind::Name(_) => {}
    }
    v.expr(e);
}

struct Normalizer;

impl VisitMut for Normalizer {
    fn block(&mut self, b: &mut Block) {
        b.span = Span::default();
        b.dangling.clear();
        b.braced = true;
    }
    fn stmt(&mut self, s: &mut Stmt) {
        s.span = Span::default();
        s.trivia = Trivia::default();
        match &mut s.kind {
            StmtKind::If { header_span, .. }
            | StmtKind::When { header_span, .. }
            | StmtKind::For { header_span, .. }
            | StmtKind::While { header_span, .. }
            | StmtKind::DoWhile { header_span, .. } => *header_span = Span::default(),
            _ => {}
        }
    }
    fn branch(&mut self, b: &mut WhenBranch) {
        b.span = Span::default();
        b.cond_span = Span::default();
        b.trivia = Trivia::default();
    }
    fn expr(&mut self, e: &mut Expr) {
        e.span = Span::default();
    }
    fn function(&mut self, f: &mut FunctionDecl) {
        f.span = Span::default();
        f.signature_span = Span::default();
        f.trivia = Trivia::default();
    }
}

pub fn normalize_module(m: &mut SourceModule) {
    walk_module(&mut Normalizer, m);
    m.trailing_comments.clear();
}

pub fn normalize_function(f: &mut FunctionDecl) {
    walk_function(&mut Normalizer, f);
}

pub fn normalize_stmt(s: &mut Stmt) {
    walk_stmt(&mut Normalizer, s);
}

pub fn normalize_block(b: &mut Block) {
    walk_block(&mut Normalizer, b);
}

pub fn normalize_expr(e: &mut Expr) {
    walk_expr(&mut Normalizer, e);
}

struct CommentStripper;

impl VisitMut for CommentStripper {
    fn block(&mut self, b: &mut Block) {
        b.dangling.clear();
    }
    fn stmt(&mut self, s: &mut Stmt) {
        s.trivia = Trivia::default();
    }
    fn branch(&mut self, b: &mut WhenBranch) {
        b.trivia = Trivia::default();
    }
    fn function(&mut self, f: &mut FunctionDecl) {
        f.trivia = Trivia::default();
    }
}

pub fn strip_comments_stmt(s: &mut Stmt) {
    walk_stmt(&mut CommentStripper, s);
}

pub fn strip_comments_function(f: &mut FunctionDecl) {
    walk_function(&mut CommentStripper, f);
}

pub fn strip_comments_block(b: &mut Block) {
    walk_block(&mut CommentStripper, b);
}

#[derive(Default)]
struct CommentCounter(usize);

impl VisitMut for CommentCounter {
    fn block(&mut self, b: &mut Block) {
        self.0 += b.dangling.len();
    }
    fn stmt(&mut self, s: &mut Stmt) {
        self.0 += s.trivia.len();
    }
    fn branch(&mut self, b: &mut WhenBranch) {
        self.0 += b.trivia.len();
    }
    fn function(&mut self, f: &mut FunctionDecl) {
        self.0 += f.trivia.len();
    }
}

/// Number of comment tokens anywhere in the module.
pub fn count_comments(m: &SourceModule) -> usize {
    let mut c = CommentCounter::default();
    walk_module(&mut c, &mut m.clone());
    c.0 + m.trailing_comments.len()
}

pub fn count_comments_stmt(s: &Stmt) -> usize {
    let mut c = CommentCounter::default();
    walk_stmt(&mut c, &mut s.clone());
    c.0
}

pub fn count_comments_function(f: &FunctionDecl) -> usize {
    let mut c = CommentCounter::default();
    walk_function(&mut c, &mut f.clone());
    c.0
}
