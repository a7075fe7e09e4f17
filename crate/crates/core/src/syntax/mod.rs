//! Parsing, printing and simple queries over the Kotlin teaching subset.

pub mod ast;
pub mod lexer;
pub mod parser;
pub mod printer;
pub mod visit;

use serde::{Deserialize, Serialize};

pub use ast::*;
pub use parser::{parse, parse_expression, parse_statement};
pub use printer::{print_expr, print_module, print_module_with, PrintOptions};

/// Syntax error with a 1-based position.
#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error, Serialize, Deserialize)]
#[error("{line}:{column}: {message}")]
pub struct ParseError {
    pub line: u32,
    pub column: u32,
    pub message: String,
}

/// One `name(p: T, ...): R` string per function, in declaration order.
pub fn extract_signatures(module: &SourceModule) -> Vec<String> {
    module.functions.iter().map(printer::print_signature).collect()
}

/// Distinct string literals in first-occurrence order, escapes decoded.
pub fn extract_string_literals(module: &SourceModule) -> Vec<String> {
    struct Collect(Vec<String>);
    impl visit::VisitMut for Collect {
        fn expr(&mut self, e: &mut Expr) {
            if let ExprKind::Str(s) = &e.kind {
                if !self.0.contains(s) {
                    self.0.push(s.clone());
                }
            }
        }
    }
    // Children are visited before parents, which is also source order for
    // the expression shapes the subset allows.
    let mut c = Collect(Vec::new());
    visit::walk_module(&mut c, &mut module.clone());
    c.0
}

/// Removes every comment; structure and spans are untouched.
pub fn strip_comments(module: &SourceModule) -> SourceModule {
    let mut m = module.clone();
    for f in &mut m.functions {
        visit::strip_comments_function(f);
    }
    for s in &mut m.statements {
        visit::strip_comments_stmt(s);
    }
    m.trailing_comments.clear();
    m
}

#[cfg(test)]
mod tests;
