//! Turns one change unit into edited student text, touching as little of
//! the original text as possible.

use crate::diff::{apply_units, BlockPath, ChangeUnit, ContainerRef, Edit, HeaderEdit, HeaderTarget, Item, NodePath};
use crate::model::LineSpan;
use crate::syntax::printer::{print_branch, print_branch_conditions, print_function, print_stmt};
use crate::syntax::{
    parse, print_expr, print_module, strip_comments, Block, FunctionDecl, PrintOptions, SourceModule, Span, Stmt,
    StmtKind, WhenBranch,
};

const PLAIN: PrintOptions = PrintOptions { comments: false };
const INDENT: &str = "    ";

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum RenderError {
    /// The unit does not apply to the student program.
    Apply(String),
    /// Neither splicing nor re-printing produced the expected program.
    Mismatch,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Rendered {
    pub after: String,
    /// Expected program, comments removed.
    pub module: SourceModule,
    /// Whether the text was spliced in place rather than re-printed.
    pub spliced: bool,
}

/// Applies `unit` to `src` (parsed as `student`).
pub fn render(src: &str, student: &SourceModule, unit: &ChangeUnit) -> Result<Rendered, RenderError> {
    let expected = apply_units(student, [unit]).map_err(|e| RenderError::Apply(e.to_string()))?;
    let expected = strip_comments(&expected);
    let matches = |text: &str| parse(text).map(|m| m.structurally_eq(&expected)).unwrap_or(false);

    if let Some(text) = splice(src, student, unit) {
        if matches(&text) {
            return Ok(Rendered { after: text, module: expected, spliced: true });
        }
    }
    let text = reprint(src, student, unit).ok_or(RenderError::Mismatch)?;
    if matches(&text) {
        Ok(Rendered { after: text, module: expected, spliced: false })
    } else {
        Err(RenderError::Mismatch)
    }
}

struct Text<'a> {
    src: &'a str,
}

impl<'a> Text<'a> {
    fn line_start(&self, offset: usize) -> usize {
        self.src[..offset].rfind('\n').map(|i| i + 1).unwrap_or(0)
    }

    /// Offset just past the newline ending the line at `offset`.
    fn next_line(&self, offset: usize) -> usize {
        self.src[offset..].find('\n').map(|i| offset + i + 1).unwrap_or(self.src.len())
    }

    fn indent_at(&self, offset: usize) -> &'a str {
        let start = self.line_start(offset);
        let line = &self.src[start..];
        let n = line.len() - line.trim_start_matches([' ', '\t']).len();
        &line[..n]
    }

    fn blank_before(&self, offset: usize) -> bool {
        self.src[self.line_start(offset)..offset].trim().is_empty()
    }

    fn blank_after(&self, offset: usize) -> bool {
        let end = self.next_line(offset);
        self.src[offset..end].trim().is_empty()
    }

    fn splice(&self, start: usize, end: usize, with: &str) -> String {
        let mut out = String::with_capacity(self.src.len() + with.len());
        out.push_str(&self.src[..start]);
        out.push_str(with);
        out.push_str(&self.src[end..]);
        out
    }

    fn insert(&self, at: usize, with: &str) -> String {
        self.splice(at, at, with)
    }
}

/// Indents every line after the first by `indent`.
fn continue_indent(text: &str, indent: &str) -> String {
    let mut out = String::new();
    for (i, line) in text.trim_end_matches('\n').lines().enumerate() {
        if i > 0 {
            out.push('\n');
            if !line.is_empty() {
                out.push_str(indent);
            }
        }
        out.push_str(line);
    }
    out
}

/// Every line indented by `indent`, newline-terminated.
fn block_indent(text: &str, indent: &str) -> String {
    let mut out = String::new();
    for line in text.trim_end_matches('\n').lines() {
        if !line.is_empty() {
            out.push_str(indent);
        }
        out.push_str(line);
        out.push('\n');
    }
    out
}

fn off(p: crate::syntax::Pos) -> usize {
    p.offset as usize
}

/// Start of a node including its leading comments.
fn lead_start(span: Span, leading: &[crate::syntax::Comment]) -> usize {
    leading.first().map(|c| off(c.span.start)).unwrap_or(off(span.start)).min(off(span.start))
}

/// End of a node including its same-line trailing comments.
fn trail_end(span: Span, trailing: &[crate::syntax::Comment]) -> usize {
    trailing.last().map(|c| off(c.span.end)).unwrap_or(off(span.end)).max(off(span.end))
}

enum Container<'m> {
    /// Function body or nested block; `None` for top-level statements.
    Block(Option<&'m Block>, &'m [Stmt]),
    Branches(&'m Stmt, &'m [WhenBranch]),
}

fn child_block(s: &Stmt, slot: usize) -> Option<&Block> {
    match &s.kind {
        StmtKind::If { then_block, else_block, .. } => match slot {
            0 => Some(then_block),
            1 => else_block.as_ref(),
            _ => None,
        },
        StmtKind::For { body, .. } | StmtKind::While { body, .. } | StmtKind::DoWhile { body, .. } | StmtKind::Block(body) => {
            (slot == 0).then_some(body)
        }
        StmtKind::When { branches, .. } => branches.get(slot).map(|b| &b.body),
        _ => None,
    }
}

fn resolve_block<'m>(root: Option<&'m Block>, top: &'m [Stmt], path: &BlockPath) -> Option<(Option<&'m Block>, &'m [Stmt])> {
    let (mut block, mut stmts) = (root, top);
    for &(i, slot) in path {
        let b = child_block(stmts.get(i)?, slot)?;
        block = Some(b);
        stmts = &b.stmts;
    }
    Some((block, stmts))
}

fn resolve_stmt<'m>(root: Option<&'m Block>, top: &'m [Stmt], node: &NodePath) -> Option<&'m Stmt> {
    resolve_block(root, top, &node.container)?.1.get(node.index)
}

fn resolve_container<'m>(root: Option<&'m Block>, top: &'m [Stmt], c: &ContainerRef) -> Option<Container<'m>> {
    match c {
        ContainerRef::Block(p) => resolve_block(root, top, p).map(|(b, s)| Container::Block(b, s)),
        ContainerRef::Branches(n) => {
            let s = resolve_stmt(root, top, n)?;
            match &s.kind {
                StmtKind::When { branches, .. } => Some(Container::Branches(s, branches)),
                _ => None,
            }
        }
    }
}

fn scope_of<'m>(student: &'m SourceModule, unit: &ChangeUnit) -> Option<(Option<&'m FunctionDecl>, Option<&'m Block>, &'m [Stmt])> {
    if unit.function.is_top_level() {
        Some((None, None, &student.statements))
    } else {
        let f = student.function(&unit.function)?;
        Some((Some(f), Some(&f.body), &f.body.stmts))
    }
}

fn splice(src: &str, student: &SourceModule, unit: &ChangeUnit) -> Option<String> {
    let t = Text { src };
    match &unit.edit {
        Edit::AddFunction { decl, gap, .. } => {
            let printed = print_function(decl, PLAIN);
            let printed = printed.trim_end_matches('\n');
            if let Some(next) = student.functions.get(*gap) {
                let at = lead_start(next.span, &next.trivia.leading);
                if !t.blank_before(at) {
                    return None;
                }
                Some(t.insert(t.line_start(at), &format!("{printed}\n\n")))
            } else if let Some(last) = student.functions.last() {
                let end = trail_end(last.span, &last.trivia.trailing);
                if !t.blank_after(end) {
                    return None;
                }
                let at = t.next_line(end);
                let sep = if src[..at].ends_with('\n') { "" } else { "\n" };
                Some(t.insert(at, &format!("{sep}\n{printed}\n")))
            } else if src.trim().is_empty() {
                Some(format!("{printed}\n"))
            } else {
                Some(t.insert(0, &format!("{printed}\n\n")))
            }
        }
        Edit::DeleteFunction => {
            let f = student.function(&unit.function)?;
            let start = lead_start(f.span, &f.trivia.leading);
            let end = trail_end(f.span, &f.trivia.trailing);
            if !t.blank_before(start) || !t.blank_after(end) {
                return None;
            }
            let mut stop = t.next_line(end);
            // swallow one blank separator line
            let rest = &src[stop..];
            if let Some(nl) = rest.find('\n') {
                if rest[..nl].trim().is_empty() {
                    stop += nl + 1;
                }
            }
            Some(t.splice(t.line_start(start), stop, ""))
        }
        Edit::Signature { params, return_type } => {
            let f = student.function(&unit.function)?;
            let ps: Vec<String> = params.iter().map(|p| format!("{}: {}", p.name, p.ty)).collect();
            let mut sig = format!("({})", ps.join(", "));
            if let Some(r) = return_type {
                sig.push_str(": ");
                sig.push_str(r);
            }
            Some(t.splice(off(f.signature_span.start), off(f.signature_span.end), &sig))
        }
        Edit::Header { target, header } => {
            let (_, root, top) = scope_of(student, unit)?;
            match target {
                HeaderTarget::Stmt(node) => {
                    let s = resolve_stmt(root, top, node)?;
                    let span = match &s.kind {
                        StmtKind::If { header_span, .. }
                        | StmtKind::When { header_span, .. }
                        | StmtKind::For { header_span, .. }
                        | StmtKind::While { header_span, .. }
                        | StmtKind::DoWhile { header_span, .. } => *header_span,
                        _ => return None,
                    };
                    let text = match header {
                        HeaderEdit::Cond(e) | HeaderEdit::Subject(e) => format!("({})", print_expr(e)),
                        HeaderEdit::ForHeader { var, iterable } => format!("({var} in {})", print_expr(iterable)),
                        HeaderEdit::BranchConditions(_) => return None,
                    };
                    Some(t.splice(off(span.start), off(span.end), &text))
                }
                HeaderTarget::Branch(node, i) => {
                    let s = resolve_stmt(root, top, node)?;
                    let StmtKind::When { branches, .. } = &s.kind else { return None };
                    let b = branches.get(*i)?;
                    let HeaderEdit::BranchConditions(conds) = header else { return None };
                    let probe = WhenBranch { conditions: conds.clone(), ..b.clone() };
                    Some(t.splice(off(b.cond_span.start), off(b.cond_span.end), &print_branch_conditions(&probe)))
                }
            }
        }
        Edit::Replace { container, index, item } => {
            let (_, root, top) = scope_of(student, unit)?;
            let (span, printed) = match (resolve_container(root, top, container)?, item) {
                (Container::Block(_, stmts), Item::Stmt(new)) => (stmts.get(*index)?.span, print_stmt(new, PLAIN)),
                (Container::Branches(_, branches), Item::Branch(new)) => {
                    (branches.get(*index)?.span, print_branch(new, PLAIN))
                }
                _ => return None,
            };
            let indent = t.indent_at(off(span.start));
            Some(t.splice(off(span.start), off(span.end), &continue_indent(&printed, indent)))
        }
        Edit::Remove { container, index } => {
            let (_, root, top) = scope_of(student, unit)?;
            let (span, trailing) = match resolve_container(root, top, container)? {
                Container::Block(_, stmts) => {
                    let s = stmts.get(*index)?;
                    (s.span, &s.trivia.trailing)
                }
                Container::Branches(_, branches) => {
                    let b = branches.get(*index)?;
                    (b.span, &b.trivia.trailing)
                }
            };
            let (start, end) = (off(span.start), trail_end(span, trailing));
            if !t.blank_before(start) || !t.blank_after(end) {
                return None;
            }
            Some(t.splice(t.line_start(start), t.next_line(end), ""))
        }
        Edit::Insert { container, gap, item, .. } => {
            let (_, root, top) = scope_of(student, unit)?;
            let printed = match item {
                Item::Stmt(s) => print_stmt(s, PLAIN),
                Item::Branch(b) => print_branch(b, PLAIN),
            };
            // (span, leading, trailing) of the existing siblings
            let siblings: Vec<(Span, &[crate::syntax::Comment], &[crate::syntax::Comment])> =
                match resolve_container(root, top, container)? {
                    Container::Block(_, stmts) => {
                        stmts.iter().map(|s| (s.span, &s.trivia.leading[..], &s.trivia.trailing[..])).collect()
                    }
                    Container::Branches(_, bs) => {
                        bs.iter().map(|b| (b.span, &b.trivia.leading[..], &b.trivia.trailing[..])).collect()
                    }
                };
            if let Some((span, leading, _)) = siblings.get(*gap) {
                let at = lead_start(*span, leading);
                if !t.blank_before(at) {
                    return None;
                }
                let indent = t.indent_at(at);
                return Some(t.insert(t.line_start(at), &block_indent(&printed, indent)));
            }
            if let Some((span, _, trailing)) = siblings.last() {
                let end = trail_end(*span, trailing);
                if !t.blank_after(end) {
                    return None;
                }
                let indent = t.indent_at(off(span.start));
                let at = t.next_line(end);
                let sep = if src[..at].ends_with('\n') || at == 0 { "" } else { "\n" };
                return Some(t.insert(at, &format!("{sep}{}", block_indent(&printed, indent))));
            }
            // empty container
            match resolve_container(root, top, container)? {
                Container::Block(None, _) => {
                    let body = block_indent(&printed, "");
                    if src.trim().is_empty() {
                        Some(body)
                    } else {
                        let sep = if src.ends_with('\n') { "\n" } else { "\n\n" };
                        Some(format!("{src}{sep}{body}"))
                    }
                }
                Container::Block(Some(b), _) => {
                    if !b.braced {
                        return None;
                    }
                    let open = off(b.span.start);
                    let close = off(b.span.end).checked_sub(1)?;
                    if src.as_bytes().get(close) != Some(&b'}') {
                        return None;
                    }
                    let outer = t.indent_at(open);
                    let inner = format!("{outer}{INDENT}");
                    if t.blank_before(close) && t.line_start(close) > open {
                        Some(t.insert(t.line_start(close), &block_indent(&printed, &inner)))
                    } else {
                        let trimmed = src[..close].trim_end_matches([' ', '\t']).len();
                        Some(t.splice(trimmed, close, &format!("\n{}{outer}", block_indent(&printed, &inner))))
                    }
                }
                Container::Branches(..) => None,
            }
        }
    }
}

/// Fallback: re-print the edited function, or the whole module for
/// top-level code.
fn reprint(src: &str, student: &SourceModule, unit: &ChangeUnit) -> Option<String> {
    let t = Text { src };
    let edited = apply_units(student, [unit]).ok()?;
    match &unit.edit {
        Edit::AddFunction { .. } | Edit::DeleteFunction => Some(print_module(&edited)),
        _ if unit.function.is_top_level() => Some(print_module(&edited)),
        _ => {
            let before = student.function(&unit.function)?;
            let key = match &unit.edit {
                Edit::Signature { .. } => unit.function.clone(),
                _ => before.key(),
            };
            let mut after = edited.function(&key)?.clone();
            after.trivia = Default::default();
            let printed = print_function(&after, PrintOptions::default());
            let indent = t.indent_at(off(before.span.start));
            Some(t.splice(off(before.span.start), off(before.span.end), &continue_indent(&printed, indent)))
        }
    }
}

/// Lines of the student's code the unit points at, 1-based and clamped
/// to `[1, line count + 1]`.
pub fn highlight(src: &str, student: &SourceModule, unit: &ChangeUnit) -> LineSpan {
    let line_count = src.lines().count().max(1);
    let clamp = |s: LineSpan| {
        let start = s.start.clamp(1, line_count + 1);
        LineSpan { start, end: s.end.clamp(start, line_count + 1) }
    };
    let lines = |span: Span| LineSpan { start: span.start.line as usize, end: span.end.line as usize };
    let after_last = |span: Span| LineSpan::line(span.end.line as usize + 1);
    let fallback = LineSpan::line(line_count + 1);

    let scope = scope_of(student, unit);
    let s = match (&unit.edit, scope) {
        (Edit::AddFunction { gap, .. }, _) => match student.functions.get(*gap) {
            Some(f) => LineSpan::line(f.span.start.line as usize),
            None => student.functions.last().map(|f| after_last(f.span)).unwrap_or(fallback),
        },
        (Edit::DeleteFunction, Some((Some(f), _, _))) => lines(f.span),
        (Edit::Signature { .. }, Some((Some(f), _, _))) => lines(f.signature_span),
        (Edit::Header { target: HeaderTarget::Stmt(node), .. }, Some((_, root, top))) => {
            match resolve_stmt(root, top, node).map(|s| &s.kind) {
                Some(
                    StmtKind::If { header_span, .. }
                    | StmtKind::When { header_span, .. }
                    | StmtKind::For { header_span, .. }
                    | StmtKind::While { header_span, .. }
                    | StmtKind::DoWhile { header_span, .. },
                ) => lines(*header_span),
                _ => fallback,
            }
        }
        (Edit::Header { target: HeaderTarget::Branch(node, i), .. }, Some((_, root, top))) => {
            match resolve_stmt(root, top, node).map(|s| &s.kind) {
                Some(StmtKind::When { branches, .. }) => branches.get(*i).map(|b| lines(b.cond_span)).unwrap_or(fallback),
                _ => fallback,
            }
        }
        (Edit::Replace { container, index, .. } | Edit::Remove { container, index }, Some((_, root, top))) => {
            match resolve_container(root, top, container) {
                Some(Container::Block(_, stmts)) => stmts.get(*index).map(|s| lines(s.span)).unwrap_or(fallback),
                Some(Container::Branches(_, bs)) => bs.get(*index).map(|b| lines(b.span)).unwrap_or(fallback),
                None => fallback,
            }
        }
        (Edit::Insert { container, gap, .. }, Some((f, root, top))) => match resolve_container(root, top, container) {
            Some(Container::Block(block, stmts)) => match (stmts.get(*gap), stmts.last()) {
                (Some(s), _) => LineSpan::line(s.span.start.line as usize),
                (None, Some(last)) => after_last(last.span),
                (None, None) => match block {
                    Some(b) => LineSpan::line(b.span.start.line as usize),
                    None => f.map(|f| lines(f.span)).unwrap_or(fallback),
                },
            },
            Some(Container::Branches(when, bs)) => match (bs.get(*gap), bs.last()) {
                (Some(b), _) => LineSpan::line(b.span.start.line as usize),
                (None, Some(last)) => after_last(last.span),
                (None, None) => lines(when.span),
            },
            None => fallback,
        },
        _ => fallback,
    };
    clamp(s)
}
