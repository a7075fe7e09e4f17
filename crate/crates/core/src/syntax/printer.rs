//! Deterministic pretty-printer: 4-space indent, one statement per line,
//! minimal parentheses derived from operator precedence.

use super::ast::*;
use super::lexer::is_ident_start;

const INDENT: &str = "    ";

#[derive(Debug, Clone, Copy)]
pub struct PrintOptions {
    pub comments: bool,
}

impl Default for PrintOptions {
    fn default() -> Self {
        Self { comments: true }
    }
}

pub fn print_module(m: &SourceModule) -> String {
    print_module_with(m, PrintOptions::default())
}

pub fn print_module_with(m: &SourceModule, opts: PrintOptions) -> String {
    let mut p = Printer { out: Vec::new(), opts };
    for (i, f) in m.functions.iter().enumerate() {
        if i > 0 {
            p.out.push(String::new());
        }
        p.function(f, 0);
    }
    if !m.functions.is_empty() && !m.statements.is_empty() {
        p.out.push(String::new());
    }
    for s in &m.statements {
        p.stmt(s, 0);
    }
    if opts.comments {
        p.comments(&m.trailing_comments, 0);
    }
    join_lines(&p.out)
}

pub fn print_function(f: &FunctionDecl, opts: PrintOptions) -> String {
    let mut p = Printer { out: Vec::new(), opts };
    p.function(f, 0);
    join_lines(&p.out)
}

pub fn print_stmt(s: &Stmt, opts: PrintOptions) -> String {
    let mut p = Printer { out: Vec::new(), opts };
    p.stmt(s, 0);
    join_lines(&p.out)
}

pub fn print_branch(b: &WhenBranch, opts: PrintOptions) -> String {
    let mut p = Printer { out: Vec::new(), opts };
    p.branch(b, 0);
    join_lines(&p.out)
}

/// Signature text `name(p: T, ...): R` as it appears after `fun `.
pub fn print_signature(f: &FunctionDecl) -> String {
    let params: Vec<String> = f.params.iter().map(|p| format!("{}: {}", p.name, p.ty)).collect();
    match &f.return_type {
        Some(r) => format!("{}({}): {}", f.name, params.join(", "), r),
        None => format!("{}({})", f.name, params.join(", ")),
    }
}

/// Canonical text of a compound statement's controlling part, e.g.
/// `if (x > 0)` or `for (i in 1..n)`. `None` for plain statements.
pub fn print_header(s: &Stmt) -> Option<String> {
    Some(match &s.kind {
        StmtKind::If { cond, .. } => format!("if ({})", print_expr(cond)),
        StmtKind::When { subject: Some(e), .. } => format!("when ({})", print_expr(e)),
        StmtKind::When { subject: None, .. } => "when".to_string(),
        StmtKind::For { var, iterable, .. } => format!("for ({} in {})", var, print_expr(iterable)),
        StmtKind::While { cond, .. } => format!("while ({})", print_expr(cond)),
        StmtKind::DoWhile { cond, .. } => format!("while ({})", print_expr(cond)),
        _ => return None,
    })
}

pub fn print_branch_conditions(b: &WhenBranch) -> String {
    if b.is_else() {
        "else".to_string()
    } else {
        b.conditions.iter().map(print_expr).collect::<Vec<_>>().join(", ")
    }
}

pub fn body_line_count(b: &Block) -> usize {
    let mut p = Printer { out: Vec::new(), opts: PrintOptions { comments: false } };
    for s in &b.stmts {
        p.stmt(s, 0);
    }
    p.out.iter().filter(|l| !l.trim().is_empty()).count()
}

fn join_lines(lines: &[String]) -> String {
    if lines.is_empty() {
        return String::new();
    }
    let mut s = lines.join("\n");
    s.push('\n');
    s
}

struct Printer {
    out: Vec<String>,
    opts: PrintOptions,
}

impl Printer {
    fn line(&mut self, indent: usize, text: String) {
        self.out.push(format!("{}{}", INDENT.repeat(indent), text));
    }

    fn comments(&mut self, cs: &[Comment], indent: usize) {
        if !self.opts.comments {
            return;
        }
        for c in cs {
            let mut lines = c.text.lines();
            if let Some(first) = lines.next() {
                self.line(indent, first.to_string());
            }
            for rest in lines {
                self.out.push(rest.to_string());
            }
        }
    }

    fn trailing(&mut self, cs: &[Comment]) {
        if !self.opts.comments || cs.is_empty() {
            return;
        }
        let text: Vec<&str> = cs.iter().map(|c| c.text.as_str()).collect();
        if let Some(last) = self.out.last_mut() {
            last.push(' ');
            last.push_str(&text.join(" "));
        }
    }

    fn function(&mut self, f: &FunctionDecl, indent: usize) {
        self.comments(&f.trivia.leading, indent);
        let head = format!("fun {}", print_signature(f));
        self.block_after(indent, head, &f.body, "");
        self.trailing(&f.trivia.trailing);
    }

    /// Emits `head {`, the block contents and `}` + `tail`.
    fn block_after(&mut self, indent: usize, head: String, b: &Block, tail: &str) {
        if b.stmts.is_empty() && (b.dangling.is_empty() || !self.opts.comments) {
            self.line(indent, format!("{head} {{}}{tail}"));
            return;
        }
        self.line(indent, format!("{head} {{"));
        for s in &b.stmts {
            self.stmt(s, indent + 1);
        }
        self.comments(&b.dangling, indent + 1);
        self.line(indent, format!("}}{tail}"));
    }

    fn stmt(&mut self, s: &Stmt, indent: usize) {
        self.comments(&s.trivia.leading, indent);
        match &s.kind {
            StmtKind::VarDecl { mutable, name, ty, init } => {
                let kw = if *mutable { "var" } else { "val" };
                let ty = ty.as_ref().map(|t| format!(": {t}")).unwrap_or_default();
                self.line(indent, format!("{kw} {name}{ty} = {}", print_expr(init)));
            }
            StmtKind::Assign { target, op, value } => {
                self.line(indent, format!("{target} {} {}", op.symbol(), print_expr(value)));
            }
            StmtKind::Expr(e) => self.line(indent, print_expr(e)),
            StmtKind::Return(None) => self.line(indent, "return".to_string()),
            StmtKind::Return(Some(e)) => self.line(indent, format!("return {}", print_expr(e))),
            StmtKind::If { .. } => self.if_chain(s, indent, String::new()),
            StmtKind::When { subject, branches, .. } => {
                let head = match subject {
                    Some(e) => format!("when ({})", print_expr(e)),
                    None => "when".to_string(),
                };
                if branches.is_empty() {
                    self.line(indent, format!("{head} {{}}"));
                } else {
                    self.line(indent, format!("{head} {{"));
                    for b in branches {
                        self.branch(b, indent + 1);
                    }
                    self.line(indent, "}".to_string());
                }
            }
            StmtKind::For { var, iterable, body, .. } => {
                self.block_after(indent, format!("for ({var} in {})", print_expr(iterable)), body, "");
            }
            StmtKind::While { cond, body, .. } => {
                self.block_after(indent, format!("while ({})", print_expr(cond)), body, "");
            }
            StmtKind::DoWhile { body, cond, .. } => {
                let tail = format!(" while ({})", print_expr(cond));
                self.block_after(indent, "do".to_string(), body, &tail);
            }
            StmtKind::Block(b) => {
                if b.stmts.is_empty() && (b.dangling.is_empty() || !self.opts.comments) {
                    self.line(indent, "{}".to_string());
                } else {
                    self.line(indent, "{".to_string());
                    for s in &b.stmts {
                        self.stmt(s, indent + 1);
                    }
                    self.comments(&b.dangling, indent + 1);
                    self.line(indent, "}".to_string());
                }
            }
        }
        self.trailing(&s.trivia.trailing);
    }

    /// Prints an `if` and folds `else { if ... }` into `else if`.
    fn if_chain(&mut self, s: &Stmt, indent: usize, prefix: String) {
        let StmtKind::If { cond, then_block, else_block, .. } = &s.kind else { unreachable!() };
        let head = format!("{prefix}if ({})", print_expr(cond));
        match else_block {
            None => self.block_after(indent, head, then_block, ""),
            Some(eb) => {
                self.block_after(indent, head, then_block, "");
                let last = self.out.pop().unwrap_or_default();
                let closing = last.trim_start().to_string();
                let nested_if = eb.stmts.len() == 1
                    && matches!(eb.stmts[0].kind, StmtKind::If { .. })
                    && (eb.stmts[0].trivia.is_empty() || !self.opts.comments)
                    && (eb.dangling.is_empty() || !self.opts.comments);
                if nested_if {
                    self.if_chain(&eb.stmts[0], indent, format!("{closing} else "));
                } else {
                    self.block_after(indent, format!("{closing} else"), eb, "");
                }
            }
        }
    }

    fn branch(&mut self, b: &WhenBranch, indent: usize) {
        self.comments(&b.trivia.leading, indent);
        let head = format!("{} ->", print_branch_conditions(b));
        let inline = b.body.stmts.len() == 1
            && (b.body.dangling.is_empty() || !self.opts.comments)
            && (b.body.stmts[0].trivia.is_empty() || !self.opts.comments)
            && matches!(b.body.stmts[0].kind, StmtKind::Expr(_) | StmtKind::Assign { .. } | StmtKind::Return(_));
        if inline {
            let mut sub = Printer { out: Vec::new(), opts: self.opts };
            sub.stmt(&b.body.stmts[0], 0);
            self.line(indent, format!("{head} {}", sub.out.join(" ")));
        } else {
            self.block_after(indent, head, &b.body, "");
        }
        self.trailing(&b.trivia.trailing);
    }
}

fn expr_precedence(e: &Expr) -> u8 {
    match &e.kind {
        ExprKind::Binary { op, .. } => op.precedence(),
        ExprKind::Unary { .. } => UNARY_PRECEDENCE,
        _ => POSTFIX_PRECEDENCE,
    }
}

pub fn print_expr(e: &Expr) -> String {
    match &e.kind {
        ExprKind::Int(v) => v.to_string(),
        ExprKind::Bool(b) => b.to_string(),
        ExprKind::Str(s) => quote_string(s),
        ExprKind::Name(n) => n.clone(),
        ExprKind::Call { receiver, name, args } => {
            let args: Vec<String> = args.iter().map(print_expr).collect();
            match receiver {
                Some(r) => format!("{}.{}({})", postfix_operand(r), name, args.join(", ")),
                None => format!("{}({})", name, args.join(", ")),
            }
        }
        ExprKind::Member { receiver, name } => format!("{}.{}", postfix_operand(receiver), name),
        ExprKind::Binary { op, lhs, rhs } => {
            let p = op.precedence();
            let l = if expr_precedence(lhs) < p { format!("({})", print_expr(lhs)) } else { print_expr(lhs) };
            let r = if expr_precedence(rhs) <= p { format!("({})", print_expr(rhs)) } else { print_expr(rhs) };
            if *op == BinaryOp::Range {
                format!("{l}..{r}")
            } else {
                format!("{l} {} {r}", op.symbol())
            }
        }
        ExprKind::Unary { op, operand } => {
            let inner = if expr_precedence(operand) <= UNARY_PRECEDENCE {
                format!("({})", print_expr(operand))
            } else {
                print_expr(operand)
            };
            format!("{}{}", op.symbol(), inner)
        }
    }
}

fn postfix_operand(e: &Expr) -> String {
    if expr_precedence(e) < POSTFIX_PRECEDENCE {
        format!("({})", print_expr(e))
    } else {
        print_expr(e)
    }
}

pub fn quote_string(s: &str) -> String {
    let mut out = String::with_capacity(s.len() + 2);
    out.push('"');
    let chars: Vec<char> = s.chars().collect();
    for (i, &c) in chars.iter().enumerate() {
        match c {
            '"' => out.push_str("\\\""),
            '\\' => out.push_str("\\\\"),
            '\n' => out.push_str("\\n"),
            '\t' => out.push_str("\\t"),
            '\r' => out.push_str("\\r"),
            '\u{8}' => out.push_str("\\b"),
            '$' if matches!(chars.get(i + 1), Some(&n) if is_ident_start(n) || n == '{') => out.push_str("\\$"),
            c if c.is_control() => out.push_str(&format!("\\u{:04x}", c as u32)),
            c => out.push(c),
        }
    }
    out.push('"');
    out
}
