use std::collections::BTreeMap;

use thiserror::Error;

use crate::syntax::printer::{print_branch, print_branch_conditions, print_function, print_header, print_signature, print_stmt};
use crate::syntax::{FunctionDecl, FunctionKey, PrintOptions, SourceModule, Stmt, StmtKind, WhenBranch};

use super::*;

const PLAIN: PrintOptions = PrintOptions { comments: false };

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ApplyError {
    #[error("anchor {anchor:?} in {function} does not match the program")]
    StaleAnchor { function: String, anchor: Vec<usize> },
    #[error("function {0} not found")]
    UnknownFunction(String),
}

fn stale(u: &ChangeUnit) -> ApplyError {
    ApplyError::StaleAnchor { function: u.function.to_string(), anchor: u.anchor.clone() }
}

fn same_fragment(expected: &Option<String>, actual: &str) -> bool {
    match expected {
        Some(e) => e.trim_end_matches('\n') == actual.trim_end_matches('\n'),
        None => true,
    }
}

/// Apply a subset of units computed against `before`.
///
/// Units must come from one `diff_modules(before, _)` call; edits inside a
/// function are applied deepest container first so sibling indices keep
/// their `before` meaning.
pub fn apply_units<'a, I>(before: &SourceModule, units: I) -> Result<SourceModule, ApplyError>
where
    I: IntoIterator<Item = &'a ChangeUnit>,
{
    let mut module = before.clone();
    let mut by_function: Vec<(FunctionKey, Vec<&ChangeUnit>)> = Vec::new();
    let mut added: Vec<(usize, usize, &FunctionDecl)> = Vec::new();
    let mut deleted: Vec<&ChangeUnit> = Vec::new();
    for u in units {
        match &u.edit {
            Edit::AddFunction { decl, gap, order } => added.push((*gap, *order, decl)),
            Edit::DeleteFunction => deleted.push(u),
            _ => match by_function.iter_mut().find(|(k, _)| k == &u.function) {
                Some((_, list)) => list.push(u),
                None => by_function.push((u.function.clone(), vec![u])),
            },
        }
    }

    for (key, units) in &by_function {
        if key.is_top_level() {
            apply_body(&mut module.statements, units)?;
            continue;
        }
        let f = module.function_mut(key).ok_or_else(|| ApplyError::UnknownFunction(key.to_string()))?;
        apply_body(&mut f.body.stmts, units)?;
        for u in units {
            if let Edit::Signature { params, return_type } = &u.edit {
                if !same_fragment(&u.before, &format!("fun {}", print_signature(f))) {
                    return Err(stale(u));
                }
                f.params = params.clone();
                f.return_type = return_type.clone();
            }
        }
    }

    if added.is_empty() && deleted.is_empty() {
        return Ok(module);
    }
    let mut removed = vec![false; module.functions.len()];
    for u in deleted {
        let idx = before
            .functions
            .iter()
            .position(|f| f.key() == u.function)
            .ok_or_else(|| ApplyError::UnknownFunction(u.function.to_string()))?;
        if !same_fragment(&u.before, &print_function(&before.functions[idx], PLAIN)) {
            return Err(stale(u));
        }
        removed[idx] = true;
    }
    added.sort_by_key(|(gap, order, _)| (*gap, *order));
    let old = std::mem::take(&mut module.functions);
    let mut pending = added.into_iter().peekable();
    for (i, f) in old.into_iter().enumerate() {
        while let Some((_, _, decl)) = pending.next_if(|(gap, _, _)| *gap <= i) {
            module.functions.push(decl.clone());
        }
        if !removed[i] {
            module.functions.push(f);
        }
    }
    module.functions.extend(pending.map(|(_, _, d)| d.clone()));
    Ok(module)
}

fn apply_body(root: &mut Vec<Stmt>, units: &[&ChangeUnit]) -> Result<(), ApplyError> {
    for u in units {
        if let Edit::Header { target, header } = &u.edit {
            apply_header(root, u, target, header)?;
        }
    }

    type Groups<'a> = BTreeMap<(std::cmp::Reverse<usize>, String), (&'a ContainerRef, Vec<&'a ChangeUnit>)>;
    let mut containers: Groups = BTreeMap::new();
    for u in units {
        let c = match &u.edit {
            Edit::Insert { container, .. } | Edit::Remove { container, .. } | Edit::Replace { container, .. } => container,
            _ => continue,
        };
        let key = (std::cmp::Reverse(c.depth()), format!("{c:?}"));
        containers.entry(key).or_insert_with(|| (c, Vec::new())).1.push(u);
    }
    for (c, units) in containers.into_values() {
        match c {
            ContainerRef::Block(path) => {
                let list = block_mut(root, path).ok_or_else(|| stale(units[0]))?;
                splice(list, &units, |s| print_stmt(s, PLAIN), |item| match item {
                    Item::Stmt(s) => Some(s.clone()),
                    Item::Branch(_) => None,
                })?;
            }
            ContainerRef::Branches(node) => {
                let list = branches_mut(root, node).ok_or_else(|| stale(units[0]))?;
                splice(list, &units, |b| print_branch(b, PLAIN), |item| match item {
                    Item::Branch(b) => Some(b.clone()),
                    Item::Stmt(_) => None,
                })?;
            }
        }
    }
    Ok(())
}

fn apply_header(root: &mut Vec<Stmt>, u: &ChangeUnit, target: &HeaderTarget, header: &HeaderEdit) -> Result<(), ApplyError> {
    match target {
        HeaderTarget::Stmt(node) => {
            let s = stmt_mut(root, node).ok_or_else(|| stale(u))?;
            if !same_fragment(&u.before, &print_header(s).unwrap_or_default()) {
                return Err(stale(u));
            }
            match (&mut s.kind, header) {
                (StmtKind::If { cond, .. }, HeaderEdit::Cond(e))
                | (StmtKind::While { cond, .. }, HeaderEdit::Cond(e))
                | (StmtKind::DoWhile { cond, .. }, HeaderEdit::Cond(e)) => *cond = e.clone(),
                (StmtKind::When { subject: Some(subject), .. }, HeaderEdit::Subject(e)) => *subject = e.clone(),
                (StmtKind::For { var, iterable, .. }, HeaderEdit::ForHeader { var: v, iterable: it }) => {
                    *var = v.clone();
                    *iterable = it.clone();
                }
                _ => return Err(stale(u)),
            }
        }
        HeaderTarget::Branch(node, i) => {
            let b = branches_mut(root, node).and_then(|bs| bs.get_mut(*i)).ok_or_else(|| stale(u))?;
            if !same_fragment(&u.before, &print_branch_conditions(b)) {
                return Err(stale(u));
            }
            let HeaderEdit::BranchConditions(conds) = header else { return Err(stale(u)) };
            b.conditions = conds.clone();
        }
    }
    Ok(())
}

/// Rebuild one list from its `before` items plus the edits aimed at it.
fn splice<T: Clone>(
    list: &mut Vec<T>,
    units: &[&ChangeUnit],
    print: impl Fn(&T) -> String,
    unwrap: impl Fn(&Item) -> Option<T>,
) -> Result<(), ApplyError> {
    let n = list.len();
    let mut replaced: Vec<Option<Option<T>>> = vec![None; n];
    let mut inserts: Vec<(usize, usize, T)> = Vec::new();
    for u in units {
        match &u.edit {
            Edit::Remove { index, .. } | Edit::Replace { index, .. } => {
                let current = list.get(*index).ok_or_else(|| stale(u))?;
                if !same_fragment(&u.before, &print(current)) || replaced[*index].is_some() {
                    return Err(stale(u));
                }
                replaced[*index] = Some(match &u.edit {
                    Edit::Replace { item, .. } => Some(unwrap(item).ok_or_else(|| stale(u))?),
                    _ => None,
                });
            }
            Edit::Insert { gap, order, item, .. } => {
                if *gap > n {
                    return Err(stale(u));
                }
                inserts.push((*gap, *order, unwrap(item).ok_or_else(|| stale(u))?));
            }
            _ => {}
        }
    }
    inserts.sort_by_key(|(g, o, _)| (*g, *o));
    let old = std::mem::take(list);
    let mut pending = inserts.into_iter().peekable();
    for (i, x) in old.into_iter().enumerate() {
        while let Some((_, _, item)) = pending.next_if(|(g, _, _)| *g <= i) {
            list.push(item);
        }
        match replaced[i].take() {
            None => list.push(x),
            Some(Some(r)) => list.push(r),
            Some(None) => {}
        }
    }
    list.extend(pending.map(|(_, _, item)| item));
    Ok(())
}

fn child_block(s: &mut Stmt, slot: usize) -> Option<&mut Vec<Stmt>> {
    match &mut s.kind {
        StmtKind::If { then_block, else_block, .. } => match slot {
            0 => Some(&mut then_block.stmts),
            1 => else_block.as_mut().map(|b| &mut b.stmts),
            _ => None,
        },
        StmtKind::For { body, .. } | StmtKind::While { body, .. } | StmtKind::DoWhile { body, .. } | StmtKind::Block(body) => {
            (slot == 0).then_some(&mut body.stmts)
        }
        StmtKind::When { branches, .. } => branches.get_mut(slot).map(|b| &mut b.body.stmts),
        _ => None,
    }
}

fn block_mut<'a>(root: &'a mut Vec<Stmt>, path: &BlockPath) -> Option<&'a mut Vec<Stmt>> {
    let mut cur = root;
    for &(i, slot) in path {
        cur = child_block(cur.get_mut(i)?, slot)?;
    }
    Some(cur)
}

fn stmt_mut<'a>(root: &'a mut Vec<Stmt>, node: &NodePath) -> Option<&'a mut Stmt> {
    block_mut(root, &node.container)?.get_mut(node.index)
}

fn branches_mut<'a>(root: &'a mut Vec<Stmt>, node: &NodePath) -> Option<&'a mut Vec<WhenBranch>> {
    match &mut stmt_mut(root, node)?.kind {
        StmtKind::When { branches, .. } => Some(branches),
        _ => None,
    }
}
