use crate::syntax::printer::{
    print_branch, print_branch_conditions, print_function, print_header, print_signature, print_stmt,
};
use crate::syntax::{
    Construct, FunctionDecl, FunctionKey, PrintOptions, SourceModule, Span, Stmt, StmtKind, WhenBranch,
};

use super::*;

const PLAIN: PrintOptions = PrintOptions { comments: false };

fn fingerprint_stmt(s: &Stmt) -> String {
    print_stmt(s, PLAIN)
}

fn fingerprint_branch(b: &WhenBranch) -> String {
    print_branch(b, PLAIN)
}

fn trim_fragment(s: String) -> String {
    s.trim_end_matches('\n').to_string()
}

/// Functions matched by `(name, arity)`: `after` order first, then
/// unmatched `before` functions in their original order. Matches keep
/// source order (longest common subsequence of keys), so a function that
/// moved shows up as deleted and added.
pub fn align_functions<'a>(
    before: &'a SourceModule,
    after: &'a SourceModule,
) -> Vec<(Option<&'a FunctionDecl>, Option<&'a FunctionDecl>)> {
    let bk: Vec<FunctionKey> = before.functions.iter().map(FunctionDecl::key).collect();
    let ak: Vec<FunctionKey> = after.functions.iter().map(FunctionDecl::key).collect();
    let (n, m) = (bk.len(), ak.len());
    let mut lcs = vec![vec![0usize; m + 1]; n + 1];
    for i in (0..n).rev() {
        for j in (0..m).rev() {
            lcs[i][j] = if bk[i] == ak[j] { lcs[i + 1][j + 1] + 1 } else { lcs[i + 1][j].max(lcs[i][j + 1]) };
        }
    }
    let mut partner: Vec<Option<usize>> = vec![None; m];
    let mut used = vec![false; n];
    let (mut i, mut j) = (0, 0);
    while i < n && j < m {
        if bk[i] == ak[j] {
            partner[j] = Some(i);
            used[i] = true;
            i += 1;
            j += 1;
        } else if lcs[i + 1][j] >= lcs[i][j + 1] {
            i += 1;
        } else {
            j += 1;
        }
    }
    let mut pairs: Vec<_> =
        after.functions.iter().zip(&partner).map(|(a, p)| (p.map(|i| &before.functions[i]), Some(a))).collect();
    for (i, b) in before.functions.iter().enumerate() {
        if !used[i] {
            pairs.push((Some(b), None));
        }
    }
    pairs
}

pub fn diff_modules(before: &SourceModule, after: &SourceModule) -> ChangeSet {
    let mut set = ChangeSet::default();

    let mut top = Vec::new();
    let ctx = Ctx { function: FunctionKey::top_level() };
    ctx.diff_block(&Vec::new(), &Vec::new(), Construct::Statement, &before.statements, &after.statements, &mut top);
    if !top.is_empty() {
        set.functions.push(FunctionChanges { function: FunctionKey::top_level(), units: top });
    }

    let pairs = align_functions(before, after);
    let before_index = |f: &FunctionDecl| before.functions.iter().position(|g| std::ptr::eq(g, f));
    // Gap in the `before` list after the last matched function seen so far.
    let mut gap = 0;
    let mut order = 0;
    for (b, a) in pairs {
        if let Some(bf) = b {
            if a.is_some() {
                gap = before_index(bf).map(|i| i + 1).unwrap_or(gap);
            }
        }
        let units = diff_function_at(b, a, gap, order);
        if a.is_some() {
            order += 1;
        }
        if !units.is_empty() {
            let function = a.or(b).map(|f| f.key()).expect("pair has a side");
            set.functions.push(FunctionChanges { function, units });
        }
    }
    set
}

/// Classified units for one aligned pair. Panics if both sides are absent.
pub fn diff_function(before: Option<&FunctionDecl>, after: Option<&FunctionDecl>) -> Vec<ChangeUnit> {
    diff_function_at(before, after, 0, 0)
}

fn diff_function_at(before: Option<&FunctionDecl>, after: Option<&FunctionDecl>, gap: usize, order: usize) -> Vec<ChangeUnit> {
    match (before, after) {
        (None, None) => panic!("diff_function needs at least one side"),
        (None, Some(a)) => vec![ChangeUnit {
            function: a.key(),
            kind: UnitKind::AddConstruct,
            anchor: Vec::new(),
            construct: Construct::FunctionDecl,
            before: None,
            after: Some(trim_fragment(print_function(a, PLAIN))),
            before_span: None,
            after_span: Some(a.span),
            edit: Edit::AddFunction { decl: a.clone(), gap, order },
        }],
        (Some(b), None) => vec![ChangeUnit {
            function: b.key(),
            kind: UnitKind::DeleteConstruct,
            anchor: Vec::new(),
            construct: Construct::FunctionDecl,
            before: Some(trim_fragment(print_function(b, PLAIN))),
            after: None,
            before_span: Some(b.span),
            after_span: None,
            edit: Edit::DeleteFunction,
        }],
        (Some(b), Some(a)) => {
            let ctx = Ctx { function: a.key() };
            let mut out = Vec::new();
            if b.params != a.params || b.return_type != a.return_type {
                out.push(ChangeUnit {
                    function: a.key(),
                    kind: UnitKind::HeaderModification,
                    anchor: Vec::new(),
                    construct: Construct::FunctionDecl,
                    before: Some(format!("fun {}", print_signature(b))),
                    after: Some(format!("fun {}", print_signature(a))),
                    before_span: Some(b.signature_span),
                    after_span: Some(a.signature_span),
                    edit: Edit::Signature { params: a.params.clone(), return_type: a.return_type.clone() },
                });
            }
            ctx.diff_block(&Vec::new(), &Vec::new(), Construct::FunctionDecl, &b.body.stmts, &a.body.stmts, &mut out);
            out
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Op {
    Match,
    Sub,
    Del,
    Ins,
}

/// Minimum-cost alignment (match 0, substitute 1, delete 1, insert 1).
/// Substitution is only allowed between compatible items.
fn align<T>(b: &[T], a: &[T], fp: impl Fn(&T) -> String, compatible: impl Fn(&T, &T) -> bool) -> Vec<Op> {
    let bf: Vec<String> = b.iter().map(&fp).collect();
    let af: Vec<String> = a.iter().map(&fp).collect();
    let (n, m) = (b.len(), a.len());
    let mut dp = vec![vec![0usize; m + 1]; n + 1];
    for (i, row) in dp.iter_mut().enumerate() {
        row[0] = i;
    }
    for (j, cell) in dp[0].iter_mut().enumerate() {
        *cell = j;
    }
    for i in 1..=n {
        for j in 1..=m {
            let mut best = dp[i - 1][j].min(dp[i][j - 1]) + 1;
            if bf[i - 1] == af[j - 1] {
                best = best.min(dp[i - 1][j - 1]);
            } else if compatible(&b[i - 1], &a[j - 1]) {
                best = best.min(dp[i - 1][j - 1] + 1);
            }
            dp[i][j] = best;
        }
    }
    let mut ops = Vec::with_capacity(n + m);
    let (mut i, mut j) = (n, m);
    while i > 0 || j > 0 {
        if i > 0 && j > 0 && bf[i - 1] == af[j - 1] && dp[i][j] == dp[i - 1][j - 1] {
            ops.push(Op::Match);
            i -= 1;
            j -= 1;
        } else if j > 0 && dp[i][j] == dp[i][j - 1] + 1 {
            // trailing insertions before substitutions keeps substitutions
            // aligned with the start of the list on ties
            ops.push(Op::Ins);
            j -= 1;
        } else if i > 0 && dp[i][j] == dp[i - 1][j] + 1 {
            ops.push(Op::Del);
            i -= 1;
        } else {
            ops.push(Op::Sub);
            i -= 1;
            j -= 1;
        }
    }
    ops.reverse();
    ops
}

fn same_kind(x: &Stmt, y: &Stmt) -> bool {
    std::mem::discriminant(&x.kind) == std::mem::discriminant(&y.kind)
}

/// Compound pairs that can be diffed child by child.
fn same_shape(x: &Stmt, y: &Stmt) -> bool {
    match (&x.kind, &y.kind) {
        (StmtKind::If { else_block: e1, .. }, StmtKind::If { else_block: e2, .. }) => e1.is_some() == e2.is_some(),
        (StmtKind::When { subject: s1, .. }, StmtKind::When { subject: s2, .. }) => s1.is_some() == s2.is_some(),
        (StmtKind::For { .. }, StmtKind::For { .. })
        | (StmtKind::While { .. }, StmtKind::While { .. })
        | (StmtKind::DoWhile { .. }, StmtKind::DoWhile { .. })
        | (StmtKind::Block(_), StmtKind::Block(_)) => true,
        _ => false,
    }
}

fn header_span(s: &Stmt) -> Option<Span> {
    match &s.kind {
        StmtKind::If { header_span, .. }
        | StmtKind::When { header_span, .. }
        | StmtKind::For { header_span, .. }
        | StmtKind::While { header_span, .. }
        | StmtKind::DoWhile { header_span, .. } => Some(*header_span),
        _ => None,
    }
}

fn header_edit(s: &Stmt) -> Option<HeaderEdit> {
    Some(match &s.kind {
        StmtKind::If { cond, .. } | StmtKind::While { cond, .. } | StmtKind::DoWhile { cond, .. } => {
            HeaderEdit::Cond(cond.clone())
        }
        StmtKind::When { subject: Some(e), .. } => HeaderEdit::Subject(e.clone()),
        StmtKind::For { var, iterable, .. } => HeaderEdit::ForHeader { var: var.clone(), iterable: iterable.clone() },
        _ => return None,
    })
}

struct Ctx {
    function: FunctionKey,
}

impl Ctx {
    fn unit(&self, kind: UnitKind, anchor: Vec<usize>, construct: Construct, edit: Edit) -> ChangeUnit {
        ChangeUnit {
            function: self.function.clone(),
            kind,
            anchor,
            construct,
            before: None,
            after: None,
            before_span: None,
            after_span: None,
            edit,
        }
    }

    fn diff_block(
        &self,
        bpath: &BlockPath,
        apath: &BlockPath,
        enclosing: Construct,
        b: &[Stmt],
        a: &[Stmt],
        out: &mut Vec<ChangeUnit>,
    ) {
        let ops = align(b, a, fingerprint_stmt, same_kind);
        let (mut bi, mut ai) = (0, 0);
        let container = ContainerRef::Block(bpath.clone());
        for op in ops {
            match op {
                Op::Match => {
                    bi += 1;
                    ai += 1;
                }
                Op::Sub => {
                    let (bs, as_) = (&b[bi], &a[ai]);
                    let bnode = NodePath { container: bpath.clone(), index: bi };
                    let anode = NodePath { container: apath.clone(), index: ai };
                    if same_shape(bs, as_) {
                        self.diff_compound(&bnode, &anode, enclosing, bs, as_, out);
                    } else {
                        let mut u = self.unit(
                            UnitKind::BodyStatementModification,
                            bnode.flatten(),
                            enclosing,
                            Edit::Replace { container: container.clone(), index: bi, item: Item::Stmt(as_.clone()) },
                        );
                        u.before = Some(trim_fragment(fingerprint_stmt(bs)));
                        u.after = Some(trim_fragment(fingerprint_stmt(as_)));
                        u.before_span = Some(bs.span);
                        u.after_span = Some(as_.span);
                        out.push(u);
                    }
                    bi += 1;
                    ai += 1;
                }
                Op::Del => {
                    let bs = &b[bi];
                    let (kind, construct) = if bs.is_compound() {
                        (UnitKind::DeleteConstruct, bs.construct())
                    } else {
                        (UnitKind::BodyStatementModification, enclosing)
                    };
                    let anchor = NodePath { container: bpath.clone(), index: bi }.flatten();
                    let mut u = self.unit(kind, anchor, construct, Edit::Remove { container: container.clone(), index: bi });
                    u.before = Some(trim_fragment(fingerprint_stmt(bs)));
                    u.before_span = Some(bs.span);
                    out.push(u);
                    bi += 1;
                }
                Op::Ins => {
                    let as_ = &a[ai];
                    let (kind, construct, anchor) = if as_.is_compound() {
                        (UnitKind::AddConstruct, as_.construct(), NodePath { container: apath.clone(), index: ai }.flatten())
                    } else {
                        (
                            UnitKind::BodyStatementModification,
                            enclosing,
                            NodePath { container: bpath.clone(), index: bi }.flatten(),
                        )
                    };
                    let mut u = self.unit(
                        kind,
                        anchor,
                        construct,
                        Edit::Insert { container: container.clone(), gap: bi, order: ai, item: Item::Stmt(as_.clone()) },
                    );
                    u.after = Some(trim_fragment(fingerprint_stmt(as_)));
                    u.after_span = Some(as_.span);
                    out.push(u);
                    ai += 1;
                }
            }
        }
    }

    fn header_unit(&self, bnode: &NodePath, bs: &Stmt, as_: &Stmt) -> Option<ChangeUnit> {
        let (hb, ha) = (print_header(bs)?, print_header(as_)?);
        if hb == ha {
            return None;
        }
        let mut u = self.unit(
            UnitKind::HeaderModification,
            bnode.flatten(),
            bs.construct(),
            Edit::Header { target: HeaderTarget::Stmt(bnode.clone()), header: header_edit(as_)? },
        );
        u.before = Some(hb);
        u.after = Some(ha);
        u.before_span = header_span(bs);
        u.after_span = header_span(as_);
        Some(u)
    }

    fn diff_compound(
        &self,
        bnode: &NodePath,
        anode: &NodePath,
        enclosing: Construct,
        bs: &Stmt,
        as_: &Stmt,
        out: &mut Vec<ChangeUnit>,
    ) {
        let header = self.header_unit(bnode, bs, as_);
        match (&bs.kind, &as_.kind) {
            (
                StmtKind::If { then_block: t1, else_block: e1, .. },
                StmtKind::If { then_block: t2, else_block: e2, .. },
            ) => {
                out.extend(header);
                self.diff_block(&bnode.child(0), &anode.child(0), Construct::If, &t1.stmts, &t2.stmts, out);
                if let (Some(e1), Some(e2)) = (e1, e2) {
                    self.diff_block(&bnode.child(1), &anode.child(1), Construct::If, &e1.stmts, &e2.stmts, out);
                }
            }
            (StmtKind::For { body: b1, .. }, StmtKind::For { body: b2, .. })
            | (StmtKind::While { body: b1, .. }, StmtKind::While { body: b2, .. }) => {
                out.extend(header);
                self.diff_block(&bnode.child(0), &anode.child(0), bs.construct(), &b1.stmts, &b2.stmts, out);
            }
            (StmtKind::DoWhile { body: b1, .. }, StmtKind::DoWhile { body: b2, .. }) => {
                self.diff_block(&bnode.child(0), &anode.child(0), Construct::DoWhile, &b1.stmts, &b2.stmts, out);
                out.extend(header);
            }
            (StmtKind::Block(b1), StmtKind::Block(b2)) => {
                self.diff_block(&bnode.child(0), &anode.child(0), enclosing, &b1.stmts, &b2.stmts, out);
            }
            (StmtKind::When { branches: br1, .. }, StmtKind::When { branches: br2, .. }) => {
                out.extend(header);
                self.diff_branches(bnode, anode, br1, br2, out);
            }
            _ => unreachable!("diff_compound called on mismatched shapes"),
        }
    }

    fn diff_branches(
        &self,
        bnode: &NodePath,
        anode: &NodePath,
        b: &[WhenBranch],
        a: &[WhenBranch],
        out: &mut Vec<ChangeUnit>,
    ) {
        let ops = align(b, a, fingerprint_branch, |_, _| true);
        let container = ContainerRef::Branches(bnode.clone());
        let (mut bi, mut ai) = (0, 0);
        let branch_anchor = |i: usize| {
            let mut v = bnode.flatten();
            v.push(i);
            v
        };
        for op in ops {
            match op {
                Op::Match => {
                    bi += 1;
                    ai += 1;
                }
                Op::Sub => {
                    let (bb, ab) = (&b[bi], &a[ai]);
                    if bb.is_else() == ab.is_else() {
                        let (cb, ca) = (print_branch_conditions(bb), print_branch_conditions(ab));
                        if cb != ca {
                            let mut u = self.unit(
                                UnitKind::HeaderModification,
                                branch_anchor(bi),
                                Construct::When,
                                Edit::Header {
                                    target: HeaderTarget::Branch(bnode.clone(), bi),
                                    header: HeaderEdit::BranchConditions(ab.conditions.clone()),
                                },
                            );
                            u.before = Some(cb);
                            u.after = Some(ca);
                            u.before_span = Some(bb.cond_span);
                            u.after_span = Some(ab.cond_span);
                            out.push(u);
                        }
                        self.diff_block(&bnode.child(bi), &anode.child(ai), Construct::When, &bb.body.stmts, &ab.body.stmts, out);
                    } else {
                        let mut u = self.unit(
                            UnitKind::BodyStatementModification,
                            branch_anchor(bi),
                            Construct::When,
                            Edit::Replace { container: container.clone(), index: bi, item: Item::Branch(ab.clone()) },
                        );
                        u.before = Some(trim_fragment(fingerprint_branch(bb)));
                        u.after = Some(trim_fragment(fingerprint_branch(ab)));
                        u.before_span = Some(bb.span);
                        u.after_span = Some(ab.span);
                        out.push(u);
                    }
                    bi += 1;
                    ai += 1;
                }
                Op::Del => {
                    let mut u = self.unit(
                        UnitKind::BodyStatementModification,
                        branch_anchor(bi),
                        Construct::When,
                        Edit::Remove { container: container.clone(), index: bi },
                    );
                    u.before = Some(trim_fragment(fingerprint_branch(&b[bi])));
                    u.before_span = Some(b[bi].span);
                    out.push(u);
                    bi += 1;
                }
                Op::Ins => {
                    let mut u = self.unit(
                        UnitKind::BodyStatementModification,
                        branch_anchor(bi),
                        Construct::When,
                        Edit::Insert { container: container.clone(), gap: bi, order: ai, item: Item::Branch(a[ai].clone()) },
                    );
                    u.after = Some(trim_fragment(fingerprint_branch(&a[ai])));
                    u.after_span = Some(a[ai].span);
                    out.push(u);
                    ai += 1;
                }
            }
        }
    }
}
