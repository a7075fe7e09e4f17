//! Structural differences between two program versions.
//!
//! A [`ChangeSet`] groups classified [`ChangeUnit`]s per function. Units
//! carry a machine-applicable [`Edit`] whose coordinates refer to the
//! `before` module, so any subset of a change set can be applied with
//! [`apply_units`].

mod apply;
mod compute;
mod wire;

pub use apply::{apply_units, ApplyError};
pub use compute::{align_functions, diff_function, diff_modules};
pub use wire::{WireFunctionChanges, WireUnit};

use serde::{Deserialize, Serialize};

use crate::syntax::{Construct, Expr, FunctionDecl, FunctionKey, Param, Span, Stmt, WhenBranch};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum UnitKind {
    AddConstruct,
    DeleteConstruct,
    HeaderModification,
    BodyStatementModification,
}

impl UnitKind {
    pub fn as_str(self) -> &'static str {
        match self {
            UnitKind::AddConstruct => "AddConstruct",
            UnitKind::DeleteConstruct => "DeleteConstruct",
            UnitKind::HeaderModification => "HeaderModification",
            UnitKind::BodyStatementModification => "BodyStatementModification",
        }
    }
}

/// Steps from a function body (or the top-level statement list) down to a
/// nested block: `(statement index, child slot)`.
///
/// Slots: `if` then = 0, else = 1; loop and block bodies = 0; for `when`
/// the slot is the branch index and selects that branch's body.
pub type BlockPath = Vec<(usize, usize)>;

/// A statement addressed by its containing block and index.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct NodePath {
    pub container: BlockPath,
    pub index: usize,
}

impl NodePath {
    pub fn flatten(&self) -> Vec<usize> {
        let mut v = flatten_block(&self.container);
        v.push(self.index);
        v
    }

    /// Path of child block `slot` of this statement.
    pub fn child(&self, slot: usize) -> BlockPath {
        let mut p = self.container.clone();
        p.push((self.index, slot));
        p
    }
}

pub fn flatten_block(path: &BlockPath) -> Vec<usize> {
    path.iter().flat_map(|&(i, s)| [i, s]).collect()
}

/// List an edit inserts into or removes from.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum ContainerRef {
    Block(BlockPath),
    /// Branch list of the `when` statement at this path.
    Branches(NodePath),
}

impl ContainerRef {
    /// Nesting depth; deeper containers are edited first so outer indices
    /// stay valid.
    pub fn depth(&self) -> usize {
        match self {
            ContainerRef::Block(p) => 2 * p.len(),
            ContainerRef::Branches(n) => 2 * n.container.len() + 1,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub enum Item {
    Stmt(Stmt),
    Branch(WhenBranch),
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub enum HeaderTarget {
    Stmt(NodePath),
    /// Conditions of branch `usize` of the `when` at the path.
    Branch(NodePath, usize),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub enum HeaderEdit {
    /// `if`, `while`, `do-while` condition.
    Cond(Expr),
    Subject(Expr),
    ForHeader { var: String, iterable: Expr },
    BranchConditions(Vec<Expr>),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub enum Edit {
    /// `gap` indexes the `before` function list; `order` is the position in
    /// `after` and orders inserts sharing a gap.
    AddFunction { decl: FunctionDecl, gap: usize, order: usize },
    DeleteFunction,
    Signature { params: Vec<Param>, return_type: Option<String> },
    Header { target: HeaderTarget, header: HeaderEdit },
    Insert { container: ContainerRef, gap: usize, order: usize, item: Item },
    Remove { container: ContainerRef, index: usize },
    Replace { container: ContainerRef, index: usize, item: Item },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ChangeUnit {
    pub function: FunctionKey,
    pub kind: UnitKind,
    /// Flattened child indices; `before` coordinates except for
    /// `AddConstruct`, which resolves in `after`.
    pub anchor: Vec<usize>,
    pub construct: Construct,
    /// Comment-free canonical fragments.
    pub before: Option<String>,
    pub after: Option<String>,
    pub before_span: Option<Span>,
    pub after_span: Option<Span>,
    pub edit: Edit,
}

impl ChangeUnit {
    /// Whether this unit lies inside (or is the header of) the compound
    /// statement at `node`.
    pub fn within(&self, node: &NodePath) -> bool {
        let inner = node.container.len();
        let touches = |path: &BlockPath| path.len() > inner && path[..inner] == node.container[..] && path[inner].0 == node.index;
        match &self.edit {
            Edit::Header { target: HeaderTarget::Stmt(p), .. } => p == node || touches(&p.container),
            Edit::Header { target: HeaderTarget::Branch(p, _), .. } => p == node || touches(&p.container),
            Edit::Insert { container, .. } | Edit::Remove { container, .. } | Edit::Replace { container, .. } => {
                match container {
                    ContainerRef::Block(p) => touches(p),
                    ContainerRef::Branches(p) => p == node || touches(&p.container),
                }
            }
            _ => false,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FunctionChanges {
    pub function: FunctionKey,
    pub units: Vec<ChangeUnit>,
}

/// Units grouped by function. Only functions with at least one unit are
/// listed: top-level statements first, then `after` source order, then
/// deleted functions in `before` order.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct ChangeSet {
    pub functions: Vec<FunctionChanges>,
}

impl ChangeSet {
    pub fn is_empty(&self) -> bool {
        self.functions.iter().all(|f| f.units.is_empty())
    }

    pub fn unit_count(&self) -> usize {
        self.functions.iter().map(|f| f.units.len()).sum()
    }

    pub fn units(&self) -> impl Iterator<Item = &ChangeUnit> {
        self.functions.iter().flat_map(|f| f.units.iter())
    }

    pub fn function_keys(&self) -> Vec<FunctionKey> {
        self.functions.iter().filter(|f| !f.units.is_empty()).map(|f| f.function.clone()).collect()
    }

    pub fn for_function(&self, key: &FunctionKey) -> Option<&FunctionChanges> {
        self.functions.iter().find(|f| &f.function == key)
    }

    pub fn to_wire(&self) -> Vec<WireFunctionChanges> {
        self.functions.iter().map(WireFunctionChanges::from).collect()
    }
}
