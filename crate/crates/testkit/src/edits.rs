//! Random edit scripts over parsed programs.

use rand::seq::IndexedRandom;
use rand::Rng;

use stepwise_core::syntax::{
    parse, parse_statement, BinaryOp, Block, Comment, CommentKind, Expr, ExprKind, FunctionDecl, SourceModule, Stmt,
    StmtKind,
};

const SIMPLE: &[&str] = &[
    "println(count)",
    "count = count + 1",
    "val next = count * 2",
    "var total = 0",
    "println(\"Done\")",
    "total += count",
    "return count",
];

const COMPOUND: &[&str] = &[
    "if (count > 2) {\n    println(count)\n}",
    "if (count == 0) {\n    println(\"zero\")\n} else {\n    println(\"more\")\n}",
    "while (count < 3) {\n    count = count + 1\n}",
    "for (i in 1..3) {\n    println(i)\n}",
    "do {\n    count = count - 1\n} while (count > 0)",
    "when (count) {\n    1 -> println(\"one\")\n    2, 3 -> println(\"few\")\n    else -> println(\"many\")\n}",
];

/// Forms the inspections rewrite.
const UNIDIOMATIC: &[&str] = &[
    "if (count >= 1 && count <= 9) {\n    println(count)\n}",
    "val ready = done == true",
    "val waiting = done == false",
    "if (!(count == 3)) {\n    println(count)\n}",
    "if (count > 1) {\n    println(count)\n} else {\n}",
];

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum EditKind {
    DeleteStmt,
    InsertSimple,
    InsertCompound,
    InsertUnidiomatic,
    MutateExpr,
    ChangeHeader,
    AddFunction,
    DeleteFunction,
    MoveFunction,
    AddComment,
}

pub const ALL_EDITS: &[EditKind] = &[
    EditKind::DeleteStmt,
    EditKind::InsertSimple,
    EditKind::InsertCompound,
    EditKind::InsertUnidiomatic,
    EditKind::MutateExpr,
    EditKind::ChangeHeader,
    EditKind::AddFunction,
    EditKind::DeleteFunction,
    EditKind::MoveFunction,
    EditKind::AddComment,
];

/// Edits that only remove or weaken code, for deriving partial solutions.
pub const REMOVALS: &[EditKind] = &[EditKind::DeleteStmt, EditKind::DeleteFunction, EditKind::ChangeHeader];

fn stmt(src: &str) -> Stmt {
    parse_statement(src).unwrap_or_else(|e| panic!("bad snippet {src:?}: {e}"))
}

fn child_blocks(s: &mut Stmt) -> Vec<&mut Block> {
    match &mut s.kind {
        StmtKind::If { then_block, else_block, .. } => {
            let mut v = vec![then_block];
            if let Some(e) = else_block {
                v.push(e);
            }
            v
        }
        StmtKind::When { branches, .. } => branches.iter_mut().map(|b| &mut b.body).collect(),
        StmtKind::For { body, .. } | StmtKind::While { body, .. } | StmtKind::DoWhile { body, .. } => vec![body],
        StmtKind::Block(b) => vec![b],
        _ => Vec::new(),
    }
}

fn count_blocks(b: &mut Block) -> usize {
    1 + b.stmts.iter_mut().flat_map(child_blocks).map(count_blocks).sum::<usize>()
}

fn nth_block<'a>(b: &'a mut Block, k: &mut usize) -> Option<&'a mut Block> {
    if *k == 0 {
        return Some(b);
    }
    *k -= 1;
    for s in b.stmts.iter_mut() {
        for c in child_blocks(s) {
            if let Some(found) = nth_block(c, k) {
                return Some(found);
            }
        }
    }
    None
}

fn random_block<'a, R: Rng>(m: &'a mut SourceModule, rng: &mut R) -> Option<&'a mut Block> {
    if m.functions.is_empty() {
        return None;
    }
    let fi = rng.random_range(0..m.functions.len());
    let body = &mut m.functions[fi].body;
    let n = count_blocks(body);
    let mut k = rng.random_range(0..n);
    nth_block(body, &mut k)
}

fn mutate_expr<R: Rng>(e: &mut Expr, rng: &mut R) -> bool {
    match &mut e.kind {
        ExprKind::Int(i) => {
            *i += rng.random_range(1..4);
            true
        }
        ExprKind::Str(s) => {
            s.push('!');
            true
        }
        ExprKind::Binary { op, lhs, rhs } => {
            let flipped = match op {
                BinaryOp::Lt => Some(BinaryOp::Le),
                BinaryOp::Le => Some(BinaryOp::Lt),
                BinaryOp::Gt => Some(BinaryOp::Ge),
                BinaryOp::Ge => Some(BinaryOp::Gt),
                BinaryOp::Eq => Some(BinaryOp::Ne),
                BinaryOp::Ne => Some(BinaryOp::Eq),
                _ => None,
            };
            match flipped {
                Some(f) if rng.random_bool(0.5) => {
                    *op = f;
                    true
                }
                _ => {
                    let side: &mut Expr = if rng.random_bool(0.5) { lhs } else { rhs };
                    mutate_expr(side, rng)
                }
            }
        }
        ExprKind::Unary { operand, .. } => mutate_expr(operand, rng),
        ExprKind::Call { args, .. } if !args.is_empty() => {
            let i = rng.random_range(0..args.len());
            mutate_expr(&mut args[i], rng)
        }
        _ => {
            let old = std::mem::replace(e, Expr::int(0));
            *e = Expr::binary(BinaryOp::Add, old, Expr::int(1));
            true
        }
    }
}

fn header_expr(s: &mut Stmt) -> Option<&mut Expr> {
    match &mut s.kind {
        StmtKind::If { cond, .. } | StmtKind::While { cond, .. } | StmtKind::DoWhile { cond, .. } => Some(cond),
        StmtKind::For { iterable, .. } => Some(iterable),
        StmtKind::When { subject: Some(e), .. } => Some(e),
        _ => None,
    }
}

fn stmt_expr(s: &mut Stmt) -> Option<&mut Expr> {
    if s.is_compound() {
        return header_expr(s);
    }
    match &mut s.kind {
        StmtKind::VarDecl { init, .. } => Some(init),
        StmtKind::Assign { value, .. } => Some(value),
        StmtKind::Expr(e) => Some(e),
        StmtKind::Return(Some(e)) => Some(e),
        _ => None,
    }
}

/// Applies one edit of `kind` if the program has a place for it.
pub fn apply_edit<R: Rng>(m: &mut SourceModule, kind: EditKind, rng: &mut R, serial: usize) -> bool {
    match kind {
        EditKind::AddFunction => {
            // names stay unique: two declarations with one signature do not compile
            let id = loop {
                let id: u32 = rng.random_range(1..100_000);
                if !m.functions.iter().any(|f| f.name == format!("helper{id}")) {
                    break id;
                }
            };
            let src = format!("fun helper{id}(a: Int): Int {{\n    val b = a + {serial}\n    return b\n}}\n");
            let f: FunctionDecl = parse(&src).expect("helper parses").functions.remove(0);
            let at = rng.random_range(0..=m.functions.len());
            m.functions.insert(at, f);
            true
        }
        EditKind::MoveFunction => {
            let n = m.functions.len();
            if n < 2 {
                return false;
            }
            let from = rng.random_range(0..n);
            let to = (from + rng.random_range(1..n)) % n;
            let f = m.functions.remove(from);
            m.functions.insert(to, f);
            true
        }
        EditKind::DeleteFunction => {
            if m.functions.len() < 2 {
                return false;
            }
            let i = rng.random_range(0..m.functions.len());
            m.functions.remove(i);
            true
        }
        _ => {
            let Some(block) = random_block(m, rng) else { return false };
            let n = block.stmts.len();
            match kind {
                EditKind::DeleteStmt if n > 0 => {
                    block.stmts.remove(rng.random_range(0..n));
                    true
                }
                EditKind::InsertSimple | EditKind::InsertCompound | EditKind::InsertUnidiomatic => {
                    let pool = match kind {
                        EditKind::InsertSimple => SIMPLE,
                        EditKind::InsertCompound => COMPOUND,
                        _ => UNIDIOMATIC,
                    };
                    let s = stmt(pool.choose(rng).expect("non-empty pool"));
                    block.stmts.insert(rng.random_range(0..=n), s);
                    true
                }
                EditKind::MutateExpr if n > 0 => {
                    let s = &mut block.stmts[rng.random_range(0..n)];
                    stmt_expr(s).is_some_and(|e| mutate_expr(e, rng))
                }
                EditKind::ChangeHeader => {
                    let idx: Vec<usize> = (0..n).filter(|&i| block.stmts[i].is_compound()).collect();
                    let Some(&i) = idx.choose(rng) else { return false };
                    header_expr(&mut block.stmts[i]).is_some_and(|e| mutate_expr(e, rng))
                }
                EditKind::AddComment if n > 0 => {
                    let s = &mut block.stmts[rng.random_range(0..n)];
                    let c = if rng.random_bool(0.5) {
                        Comment { kind: CommentKind::Line, text: format!("// step {serial}"), span: Default::default() }
                    } else {
                        Comment { kind: CommentKind::Block, text: format!("/* note {serial} */"), span: Default::default() }
                    };
                    s.trivia.leading.push(c);
                    true
                }
                _ => false,
            }
        }
    }
}

/// Applies `len` random edits drawn from `kinds`; returns the kinds that
/// took effect.
pub fn apply_script<R: Rng>(m: &mut SourceModule, kinds: &[EditKind], len: usize, rng: &mut R) -> Vec<EditKind> {
    let mut done = Vec::new();
    let mut serial = 0;
    let mut tries = 0;
    while done.len() < len && tries < len * 10 {
        tries += 1;
        serial += 1;
        let k = *kinds.choose(rng).expect("non-empty edit kinds");
        if apply_edit(m, k, rng, serial) {
            done.push(k);
        }
    }
    done
}
