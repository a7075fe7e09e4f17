//! AST for the Kotlin teaching subset.
//!
//! Every node carries a [`Span`]. Layout data (spans, comments, brace style)
//! participates in derived `PartialEq`; use [`SourceModule::structurally_eq`]
//! or the `normalized` helpers to compare structure only.

use serde::{Deserialize, Serialize};

/// 1-based line/column position.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct Pos {
    pub line: u32,
    pub column: u32,
    /// Byte offset into the source text.
    pub offset: u32,
}

/// Half-open byte range `[start, end)` with line/column endpoints.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Span {
    pub start: Pos,
    pub end: Pos,
}

impl Span {
    pub fn new(start: Pos, end: Pos) -> Self {
        Self { start, end }
    }

    pub fn to(self, other: Span) -> Span {
        Span { start: self.start, end: other.end }
    }

    pub fn is_empty(&self) -> bool {
        self.start.offset == self.end.offset
    }

    /// Slice of `source` covered by the span.
    pub fn slice<'a>(&self, source: &'a str) -> &'a str {
        source
            .get(self.start.offset as usize..self.end.offset as usize)
            .unwrap_or("")
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum CommentKind {
    Line,
    Block,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Comment {
    pub kind: CommentKind,
    /// Full comment text including delimiters.
    pub text: String,
    pub span: Span,
}

/// Comments attached to a node: full-line comments above it and an
/// end-of-line comment after it.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Trivia {
    pub leading: Vec<Comment>,
    pub trailing: Vec<Comment>,
}

impl Trivia {
    pub fn is_empty(&self) -> bool {
        self.leading.is_empty() && self.trailing.is_empty()
    }

    pub fn len(&self) -> usize {
        self.leading.len() + self.trailing.len()
    }
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct SourceModule {
    pub functions: Vec<FunctionDecl>,
    /// Script-style statements outside any function.
    pub statements: Vec<Stmt>,
    /// Comments after the last node of the file.
    pub trailing_comments: Vec<Comment>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Param {
    pub name: String,
    pub ty: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FunctionDecl {
    pub name: String,
    pub params: Vec<Param>,
    pub return_type: Option<String>,
    pub body: Block,
    pub span: Span,
    /// From the `(` of the parameter list to the end of the return type.
    pub signature_span: Span,
    pub trivia: Trivia,
}

/// Function identity used for alignment: name plus parameter count.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct FunctionKey {
    pub name: String,
    pub arity: usize,
}

/// Reserved key under which script-style top-level statements are diffed.
pub const TOP_LEVEL_NAME: &str = "<top-level>";

impl FunctionKey {
    pub fn new(name: impl Into<String>, arity: usize) -> Self {
        Self { name: name.into(), arity }
    }

    pub fn top_level() -> Self {
        Self::new(TOP_LEVEL_NAME, 0)
    }

    pub fn is_top_level(&self) -> bool {
        self.name == TOP_LEVEL_NAME
    }
}

impl std::fmt::Display for FunctionKey {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{}/{}", self.name, self.arity)
    }
}

impl FunctionDecl {
    pub fn key(&self) -> FunctionKey {
        FunctionKey::new(self.name.clone(), self.params.len())
    }

    /// Non-blank lines strictly between the body braces in the canonical
    /// printed form, comments excluded.
    pub fn body_line_count(&self) -> usize {
        crate::syntax::printer::body_line_count(&self.body)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Block {
    pub stmts: Vec<Stmt>,
    /// Comments after the last statement, before the closing brace.
    pub dangling: Vec<Comment>,
    /// Covers `{ ... }`, or the single statement of an unbraced body.
    pub span: Span,
    pub braced: bool,
}

impl Block {
    pub fn new(stmts: Vec<Stmt>) -> Self {
        Self { stmts, dangling: Vec::new(), span: Span::default(), braced: true }
    }

    pub fn empty() -> Self {
        Self::new(Vec::new())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Stmt {
    pub kind: StmtKind,
    pub span: Span,
    pub trivia: Trivia,
}

impl Stmt {
    pub fn new(kind: StmtKind) -> Self {
        Self { kind, span: Span::default(), trivia: Trivia::default() }
    }

    pub fn construct(&self) -> Construct {
        match &self.kind {
            StmtKind::If { .. } => Construct::If,
            StmtKind::When { .. } => Construct::When,
            StmtKind::For { .. } => Construct::For,
            StmtKind::While { .. } => Construct::While,
            StmtKind::DoWhile { .. } => Construct::DoWhile,
            _ => Construct::Statement,
        }
    }

    pub fn is_compound(&self) -> bool {
        self.construct() != Construct::Statement
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum AssignOp {
    Assign,
    Add,
    Sub,
    Mul,
    Div,
    Rem,
}

impl AssignOp {
    pub fn symbol(self) -> &'static str {
        match self {
            AssignOp::Assign => "=",
            AssignOp::Add => "+=",
            AssignOp::Sub => "-=",
            AssignOp::Mul => "*=",
            AssignOp::Div => "/=",
            AssignOp::Rem => "%=",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub enum StmtKind {
    VarDecl { mutable: bool, name: String, ty: Option<String>, init: Expr },
    Assign { target: String, op: AssignOp, value: Expr },
    Expr(Expr),
    Return(Option<Expr>),
    If { cond: Expr, then_block: Block, else_block: Option<Block>, header_span: Span },
    When { subject: Option<Expr>, branches: Vec<WhenBranch>, header_span: Span },
    For { var: String, iterable: Expr, body: Block, header_span: Span },
    While { cond: Expr, body: Block, header_span: Span },
    DoWhile { body: Block, cond: Expr, header_span: Span },
    Block(Block),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WhenBranch {
    /// Empty for the `else` branch.
    pub conditions: Vec<Expr>,
    pub body: Block,
    pub span: Span,
    /// Covers the conditions (or the `else` keyword) before `->`.
    pub cond_span: Span,
    pub trivia: Trivia,
}

impl WhenBranch {
    pub fn is_else(&self) -> bool {
        self.conditions.is_empty()
    }
}

/// The compound constructs the size heuristics reason about, plus plain
/// statements.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Construct {
    FunctionDecl,
    If,
    When,
    For,
    While,
    DoWhile,
    Statement,
}

impl Construct {
    pub const COMPOUND: [Construct; 6] = [
        Construct::FunctionDecl,
        Construct::If,
        Construct::When,
        Construct::For,
        Construct::While,
        Construct::DoWhile,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            Construct::FunctionDecl => "FunctionDecl",
            Construct::If => "If",
            Construct::When => "When",
            Construct::For => "For",
            Construct::While => "While",
            Construct::DoWhile => "DoWhile",
            Construct::Statement => "Statement",
        }
    }
}

impl std::fmt::Display for Construct {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Expr {
    pub kind: ExprKind,
    pub span: Span,
}

impl Expr {
    pub fn new(kind: ExprKind) -> Self {
        Self { kind, span: Span::default() }
    }

    pub fn name(n: impl Into<String>) -> Self {
        Self::new(ExprKind::Name(n.into()))
    }

    pub fn int(v: i64) -> Self {
        Self::new(ExprKind::Int(v))
    }

    pub fn bool(v: bool) -> Self {
        Self::new(ExprKind::Bool(v))
    }

    pub fn str(v: impl Into<String>) -> Self {
        Self::new(ExprKind::Str(v.into()))
    }

    pub fn binary(op: BinaryOp, lhs: Expr, rhs: Expr) -> Self {
        Self::new(ExprKind::Binary { op, lhs: Box::new(lhs), rhs: Box::new(rhs) })
    }

    pub fn unary(op: UnaryOp, operand: Expr) -> Self {
        Self::new(ExprKind::Unary { op, operand: Box::new(operand) })
    }

    pub fn call(name: impl Into<String>, args: Vec<Expr>) -> Self {
        Self::new(ExprKind::Call { receiver: None, name: name.into(), args })
    }

    pub fn as_bool(&self) -> Option<bool> {
        match self.kind {
            ExprKind::Bool(b) => Some(b),
            _ => None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub enum ExprKind {
    Int(i64),
    Bool(bool),
    Str(String),
    Name(String),
    /// `name(args)` or `receiver.name(args)`.
    Call { receiver: Option<Box<Expr>>, name: String, args: Vec<Expr> },
    /// `receiver.name` property access.
    Member { receiver: Box<Expr>, name: String },
    Binary { op: BinaryOp, lhs: Box<Expr>, rhs: Box<Expr> },
    Unary { op: UnaryOp, operand: Box<Expr> },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum BinaryOp {
    Or,
    And,
    Eq,
    Ne,
    Lt,
    Le,
    Gt,
    Ge,
    In,
    NotIn,
    Range,
    Add,
    Sub,
    Mul,
    Div,
    Rem,
}

impl BinaryOp {
    pub fn symbol(self) -> &'static str {
        match self {
            BinaryOp::Or => "||",
            BinaryOp::And => "&&",
            BinaryOp::Eq => "==",
            BinaryOp::Ne => "!=",
            BinaryOp::Lt => "<",
            BinaryOp::Le => "<=",
            BinaryOp::Gt => ">",
            BinaryOp::Ge => ">=",
            BinaryOp::In => "in",
            BinaryOp::NotIn => "!in",
            BinaryOp::Range => "..",
            BinaryOp::Add => "+",
            BinaryOp::Sub => "-",
            BinaryOp::Mul => "*",
            BinaryOp::Div => "/",
            BinaryOp::Rem => "%",
        }
    }

    /// Binding strength; higher binds tighter.
    pub fn precedence(self) -> u8 {
        match self {
            BinaryOp::Or => 1,
            BinaryOp::And => 2,
            BinaryOp::Eq | BinaryOp::Ne => 3,
            BinaryOp::Lt | BinaryOp::Le | BinaryOp::Gt | BinaryOp::Ge => 4,
            BinaryOp::In | BinaryOp::NotIn => 5,
            BinaryOp::Range => 6,
            BinaryOp::Add | BinaryOp::Sub => 7,
            BinaryOp::Mul | BinaryOp::Div | BinaryOp::Rem => 8,
        }
    }
}

/// Precedence of prefix operators and postfix call/member chains.
pub const UNARY_PRECEDENCE: u8 = 9;
pub const POSTFIX_PRECEDENCE: u8 = 10;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum UnaryOp {
    Neg,
    Not,
}

impl UnaryOp {
    pub fn symbol(self) -> &'static str {
        match self {
            UnaryOp::Neg => "-",
            UnaryOp::Not => "!",
        }
    }
}

impl SourceModule {
    pub fn function(&self, key: &FunctionKey) -> Option<&FunctionDecl> {
        self.functions.iter().find(|f| &f.key() == key)
    }

    pub fn function_mut(&mut self, key: &FunctionKey) -> Option<&mut FunctionDecl> {
        self.functions.iter_mut().find(|f| &f.key() == key)
    }

    pub fn is_empty(&self) -> bool {
        self.functions.is_empty() && self.statements.is_empty() && self.trailing_comments.is_empty()
    }

    /// Copy with spans zeroed and comments removed.
    pub fn normalized(&self) -> SourceModule {
        let mut m = self.clone();
        crate::syntax::visit::normalize_module(&mut m);
        m
    }

    /// Equality of structure, ignoring spans, comments and brace style.
    pub fn structurally_eq(&self, other: &SourceModule) -> bool {
        self.normalized() == other.normalized()
    }
}

impl FunctionDecl {
    pub fn normalized(&self) -> FunctionDecl {
        let mut f = self.clone();
        crate::syntax::visit::normalize_function(&mut f);
        f
    }
}

impl Stmt {
    pub fn normalized(&self) -> Stmt {
        let mut s = self.clone();
        crate::syntax::visit::normalize_stmt(&mut s);
        s
    }
}

impl Expr {
    pub fn normalized(&self) -> Expr {
        let mut e = self.clone();
        crate::syntax::visit::normalize_expr(&mut e);
        e
    }
}
