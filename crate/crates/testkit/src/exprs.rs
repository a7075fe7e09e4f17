//! Random boolean expressions and small functions over `x`, `y`, `p`, `q`,
//! shaped so that every inspection has something to match.

use rand::seq::IndexedRandom;
use rand::Rng;
use stepwise_core::syntax::{parse, BinaryOp, Expr, FunctionDecl, UnaryOp};

use crate::oracle::{bools, grid, ints, Env};

pub fn int_expr<R: Rng>(rng: &mut R) -> Expr {
    match rng.random_range(0..4) {
        0 => Expr::name("x"),
        1 => Expr::name("y"),
        2 => Expr::int(rng.random_range(-2..=10)),
        _ => Expr::binary(BinaryOp::Add, Expr::name("x"), Expr::int(rng.random_range(1..=3))),
    }
}

fn bound<R: Rng>(rng: &mut R) -> Expr {
    if rng.random_bool(0.7) {
        Expr::int(rng.random_range(-2..=10))
    } else {
        Expr::name("y")
    }
}

pub fn bool_expr<R: Rng>(rng: &mut R, depth: u32) -> Expr {
    let leaf = depth == 0;
    let pick = if leaf { rng.random_range(0..4) } else { rng.random_range(0..11) };
    match pick {
        0 => Expr::name(*["p", "q"].choose(rng).unwrap()),
        1 => {
            let op = *[BinaryOp::Lt, BinaryOp::Le, BinaryOp::Gt, BinaryOp::Ge, BinaryOp::Eq, BinaryOp::Ne]
                .choose(rng)
                .unwrap();
            Expr::binary(op, int_expr(rng), int_expr(rng))
        }
        2 => {
            // x >= a && x <= b in any operand order
            let lo = if rng.random_bool(0.5) {
                Expr::binary(BinaryOp::Ge, Expr::name("x"), bound(rng))
            } else {
                Expr::binary(BinaryOp::Le, bound(rng), Expr::name("x"))
            };
            let hi = if rng.random_bool(0.5) {
                Expr::binary(BinaryOp::Le, Expr::name("x"), bound(rng))
            } else {
                Expr::binary(BinaryOp::Ge, bound(rng), Expr::name("x"))
            };
            if rng.random_bool(0.5) {
                Expr::binary(BinaryOp::And, lo, hi)
            } else {
                Expr::binary(BinaryOp::And, hi, lo)
            }
        }
        3 => {
            let a = int_expr(rng);
            let b = int_expr(rng);
            Expr::unary(UnaryOp::Not, Expr::binary(BinaryOp::Eq, a, b))
        }
        4 | 5 => {
            let inner = bool_expr(rng, depth - 1);
            let lit = Expr::bool(pick == 4);
            if rng.random_bool(0.5) {
                Expr::binary(BinaryOp::Eq, inner, lit)
            } else {
                Expr::binary(BinaryOp::Eq, lit, inner)
            }
        }
        6 => Expr::unary(UnaryOp::Not, bool_expr(rng, depth - 1)),
        7 | 8 => Expr::binary(BinaryOp::And, bool_expr(rng, depth - 1), bool_expr(rng, depth - 1)),
        9 => Expr::binary(BinaryOp::Or, bool_expr(rng, depth - 1), bool_expr(rng, depth - 1)),
        _ => Expr::unary(UnaryOp::Not, Expr::binary(BinaryOp::Eq, bool_expr(rng, depth - 1), bool_expr(rng, depth - 1))),
    }
}

/// Every assignment of `x`, `y` in -3..=12 and `p`, `q` in both truth values.
pub fn standard_grid() -> Vec<Env> {
    grid(&[("x", ints(-3..=12)), ("y", ints(-3..=12)), ("p", bools()), ("q", bools())])
}

/// A function over the grid variables whose body has the statement forms
/// the inspections rewrite, around condition `cond`.
pub fn statement_function<R: Rng>(rng: &mut R, cond: &Expr) -> FunctionDecl {
    let c = stepwise_core::syntax::print_expr(cond);
    let body = match rng.random_range(0..3) {
        0 => format!("    if ({c}) {{\n        return true\n    }} else {{\n        return false\n    }}\n"),
        1 => format!(
            "    var r = 0\n    if ({c}) {{\n        r = 1\n        println(x)\n    }} else {{\n    }}\n    return r == 1\n"
        ),
        _ => format!(
            "    if (x > 4) {{\n        println(y)\n    }} else {{\n    }}\n    if ({c}) {{\n        return true\n    }} else {{\n        return false\n    }}\n"
        ),
    };
    let src = format!("fun f(x: Int, y: Int, p: Boolean, q: Boolean): Boolean {{\n{body}}}\n");
    parse(&src).unwrap_or_else(|e| panic!("{e}\n{src}")).functions.remove(0)
}
