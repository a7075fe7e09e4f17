use std::collections::BTreeSet;

use serde::{Deserialize, Serialize};

use crate::diff::ChangeSet;
use crate::syntax::{FunctionKey, SourceModule};

/// Functions a hint may add or change.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct ScopeSet {
    pub functions_to_add: BTreeSet<FunctionKey>,
    pub functions_to_change: BTreeSet<FunctionKey>,
}

impl ScopeSet {
    pub fn contains(&self, key: &FunctionKey) -> bool {
        self.functions_to_add.contains(key) || self.functions_to_change.contains(key)
    }

    pub fn is_empty(&self) -> bool {
        self.functions_to_add.is_empty() && self.functions_to_change.is_empty()
    }
}

/// Compares student code with the model solution. Top-level statements
/// count as the pseudo-function `<top-level>/0`.
pub fn compute_scope(student: &SourceModule, model: &SourceModule) -> ScopeSet {
    let mut scope = ScopeSet::default();
    let (s, m) = (student.normalized(), model.normalized());
    if !m.statements.is_empty() && s.statements != m.statements {
        scope.functions_to_change.insert(FunctionKey::top_level());
    }
    for f in &m.functions {
        match s.function(&f.key()) {
            None => {
                scope.functions_to_add.insert(f.key());
            }
            Some(g) if g != f => {
                scope.functions_to_change.insert(f.key());
            }
            Some(_) => {}
        }
    }
    scope
}

/// Drops units outside `scope`, then keeps only the first remaining
/// function.
pub fn filter_to_scope(changes: &ChangeSet, scope: &ScopeSet) -> ChangeSet {
    let first = changes.functions.iter().find(|f| !f.units.is_empty() && scope.contains(&f.function));
    ChangeSet { functions: first.cloned().into_iter().collect() }
}
