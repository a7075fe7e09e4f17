//! Hand-written recursive-descent parser for the teaching subset.
//!
//! Statements are newline- or `;`-terminated. A binary operator starting a
//! new line ends the expression, except `&&`, `||` and `.` which may lead
//! a continuation line; inside parentheses line breaks are insignificant.

use super::ast::*;
use super::lexer::{tokenize, PendingComment, Tok, Token};
use super::ParseError;

pub fn parse(source: &str) -> Result<SourceModule, ParseError> {
    let tokens = tokenize(source)?;
    let mut p = Parser { toks: tokens, pos: 0, pending: Vec::new(), last_end: Pos::default(), depth: 0 };
    p.module()
}

/// Parses a single statement (used by span-soundness checks and tests).
pub fn parse_statement(source: &str) -> Result<Stmt, ParseError> {
    let m = parse(source)?;
    if !m.functions.is_empty() || m.statements.len() != 1 {
        return Err(ParseError { line: 1, column: 1, message: "expected exactly one statement".into() });
    }
    Ok(m.statements.into_iter().next().expect("one statement"))
}

pub fn parse_expression(source: &str) -> Result<Expr, ParseError> {
    match parse_statement(source)?.kind {
        StmtKind::Expr(e) => Ok(e),
        _ => Err(ParseError { line: 1, column: 1, message: "expected an expression".into() }),
    }
}

struct Parser {
    toks: Vec<Token>,
    pos: usize,
    pending: Vec<Comment>,
    last_end: Pos,
    depth: usize,
}

type PResult<T> = Result<T, ParseError>;

impl Parser {
    fn cur(&self) -> &Token {
        &self.toks[self.pos]
    }

    fn tok(&self) -> &Tok {
        &self.toks[self.pos].tok
    }

    fn peek_tok(&self, n: usize) -> &Tok {
        let i = (self.pos + n).min(self.toks.len() - 1);
        &self.toks[i].tok
    }

    fn at(&self, t: &Tok) -> bool {
        self.tok() == t
    }

    fn advance(&mut self) -> Token {
        let idx = self.pos;
        let comments = std::mem::take(&mut self.toks[idx].comments);
        self.pending.extend(comments.into_iter().map(|c| c.comment));
        let tok = self.toks[idx].clone();
        if tok.tok != Tok::Eof {
            self.pos += 1;
        }
        self.last_end = tok.span.end;
        tok
    }

    fn error_here(&self, expected: &str) -> ParseError {
        let t = self.cur();
        ParseError {
            line: t.span.start.line,
            column: t.span.start.column,
            message: format!("expected {expected}, found {}", t.tok.describe()),
        }
    }

    fn expect(&mut self, t: Tok) -> PResult<Token> {
        if self.at(&t) {
            Ok(self.advance())
        } else {
            Err(self.error_here(&format!("`{}`", t.text())))
        }
    }

    fn ident(&mut self, what: &str) -> PResult<(String, Span)> {
        match self.tok().clone() {
            Tok::Ident(s) => {
                let t = self.advance();
                Ok((s, t.span))
            }
            _ => Err(self.error_here(what)),
        }
    }

    /// Comments preceding the current token, including stray ones collected
    /// while parsing the previous node.
    fn take_leading(&mut self) -> Vec<Comment> {
        let mut out = std::mem::take(&mut self.pending);
        let idx = self.pos;
        out.extend(std::mem::take(&mut self.toks[idx].comments).into_iter().map(|c| c.comment));
        out
    }

    /// End-of-line comments that follow the node just parsed.
    fn take_trailing(&mut self) -> Vec<Comment> {
        let idx = self.pos;
        let comments = &mut self.toks[idx].comments;
        let n = comments.iter().take_while(|c| c.same_line).count();
        let taken: Vec<PendingComment> = comments.drain(..n).collect();
        taken.into_iter().map(|c| c.comment).collect()
    }

    fn start(&self) -> Pos {
        self.cur().span.start
    }

    fn span_from(&self, start: Pos) -> Span {
        Span::new(start, self.last_end)
    }

    fn module(&mut self) -> PResult<SourceModule> {
        let mut m = SourceModule::default();
        loop {
            while self.at(&Tok::Semi) {
                self.advance();
            }
            if self.at(&Tok::Eof) {
                break;
            }
            if self.at(&Tok::Fun) {
                let f = self.function()?;
                m.functions.push(f);
            } else {
                let s = self.statement_terminated()?;
                m.statements.push(s);
            }
        }
        let mut trailing = self.take_leading();
        trailing.extend(std::mem::take(&mut self.pending));
        m.trailing_comments = trailing;
        Ok(m)
    }

    fn function(&mut self) -> PResult<FunctionDecl> {
        let leading = self.take_leading();
        let start = self.start();
        self.expect(Tok::Fun)?;
        let (name, _) = self.ident("function name")?;
        let sig_start = self.start();
        self.expect(Tok::LParen)?;
        let mut params = Vec::new();
        while !self.at(&Tok::RParen) {
            let (pname, _) = self.ident("parameter name or `)`")?;
            self.expect(Tok::Colon)?;
            let ty = self.type_name()?;
            params.push(Param { name: pname, ty });
            if self.at(&Tok::Comma) {
                self.advance();
            } else if !self.at(&Tok::RParen) {
                return Err(self.error_here("`,` or `)`"));
            }
        }
        self.expect(Tok::RParen)?;
        let return_type = if self.at(&Tok::Colon) {
            self.advance();
            Some(self.type_name()?)
        } else {
            None
        };
        let signature_span = self.span_from(sig_start);
        let body = if self.at(&Tok::Assign) {
            self.advance();
            let e = self.expr()?;
            let span = e.span;
            let ret = Stmt { kind: StmtKind::Return(Some(e)), span, trivia: Trivia::default() };
            Block { stmts: vec![ret], dangling: Vec::new(), span, braced: false }
        } else if self.at(&Tok::LBrace) {
            self.block()?
        } else {
            return Err(self.error_here("function body"));
        };
        let span = self.span_from(start);
        let trailing = self.take_trailing();
        Ok(FunctionDecl {
            name,
            params,
            return_type,
            body,
            span,
            signature_span,
            trivia: Trivia { leading, trailing },
        })
    }

    fn type_name(&mut self) -> PResult<String> {
        let (t, _) = self.ident("type name")?;
        Ok(t)
    }

    fn block(&mut self) -> PResult<Block> {
        let start = self.start();
        self.expect(Tok::LBrace)?;
        let saved_depth = std::mem::replace(&mut self.depth, 0);
        let mut stmts = Vec::new();
        loop {
            while self.at(&Tok::Semi) {
                self.advance();
            }
            if self.at(&Tok::RBrace) || self.at(&Tok::Eof) {
                break;
            }
            stmts.push(self.statement_terminated()?);
        }
        let dangling = self.take_leading();
        self.expect(Tok::RBrace)?;
        self.depth = saved_depth;
        Ok(Block { stmts, dangling, span: self.span_from(start), braced: true })
    }

    /// A statement followed by a valid terminator.
    fn statement_terminated(&mut self) -> PResult<Stmt> {
        let mut s = self.statement()?;
        s.trivia.trailing = self.take_trailing();
        if self.at(&Tok::Semi) {
            self.advance();
            let more = self.take_trailing();
            s.trivia.trailing.extend(more);
        } else if !(self.at(&Tok::RBrace) || self.at(&Tok::Eof) || self.cur().newline_before) {
            return Err(self.error_here("newline or `;`"));
        }
        Ok(s)
    }

    fn statement(&mut self) -> PResult<Stmt> {
        let leading = self.take_leading();
        let start = self.start();
        let kind = match self.tok().clone() {
            Tok::Val | Tok::Var => {
                let mutable = self.at(&Tok::Var);
                self.advance();
                let (name, _) = self.ident("variable name")?;
                let ty = if self.at(&Tok::Colon) {
                    self.advance();
                    Some(self.type_name()?)
                } else {
                    None
                };
                self.expect(Tok::Assign)?;
                let init = self.expr()?;
                StmtKind::VarDecl { mutable, name, ty, init }
            }
            Tok::Return => {
                self.advance();
                let bare = matches!(self.tok(), Tok::RBrace | Tok::Semi | Tok::Eof | Tok::Else)
                    || self.cur().newline_before;
                if bare {
                    StmtKind::Return(None)
                } else {
                    StmtKind::Return(Some(self.expr()?))
                }
            }
            Tok::If => self.if_stmt()?,
            Tok::When => self.when_stmt()?,
            Tok::For => {
                self.advance();
                let hs = self.start();
                self.expect(Tok::LParen)?;
                let (var, _) = self.ident("loop variable")?;
                self.expect(Tok::In)?;
                let iterable = self.paren_expr_inner()?;
                self.expect(Tok::RParen)?;
                let header_span = self.span_from(hs);
                let body = self.body()?;
                StmtKind::For { var, iterable, body, header_span }
            }
            Tok::While => {
                self.advance();
                let (cond, header_span) = self.paren_cond()?;
                let body = self.body()?;
                StmtKind::While { cond, body, header_span }
            }
            Tok::Do => {
                self.advance();
                let body = self.body()?;
                self.expect(Tok::While)?;
                let (cond, header_span) = self.paren_cond()?;
                StmtKind::DoWhile { body, cond, header_span }
            }
            Tok::LBrace => StmtKind::Block(self.block()?),
            Tok::Ident(name) if is_assign_op(self.peek_tok(1)) && !self.toks[self.pos + 1].newline_before => {
                self.advance();
                let op = match self.advance().tok {
                    Tok::Assign => AssignOp::Assign,
                    Tok::PlusAssign => AssignOp::Add,
                    Tok::MinusAssign => AssignOp::Sub,
                    Tok::StarAssign => AssignOp::Mul,
                    Tok::SlashAssign => AssignOp::Div,
                    _ => AssignOp::Rem,
                };
                let value = self.expr()?;
                StmtKind::Assign { target: name, op, value }
            }
            Tok::Fun => return Err(self.error_here("statement (nested functions are not supported)")),
            _ => StmtKind::Expr(self.expr()?),
        };
        Ok(Stmt { kind, span: self.span_from(start), trivia: Trivia { leading, trailing: Vec::new() } })
    }

    fn paren_cond(&mut self) -> PResult<(Expr, Span)> {
        let hs = self.start();
        self.expect(Tok::LParen)?;
        let cond = self.paren_expr_inner()?;
        self.expect(Tok::RParen)?;
        Ok((cond, self.span_from(hs)))
    }

    /// Expression inside parentheses, where line breaks are insignificant.
    fn paren_expr_inner(&mut self) -> PResult<Expr> {
        self.depth += 1;
        let e = self.expr();
        self.depth -= 1;
        e
    }

    fn if_stmt(&mut self) -> PResult<StmtKind> {
        self.expect(Tok::If)?;
        let (cond, header_span) = self.paren_cond()?;
        let then_block = self.body()?;
        let else_block = if self.at(&Tok::Else) {
            self.advance();
            if self.at(&Tok::If) {
                let s = self.start();
                let kind = self.if_stmt()?;
                let span = self.span_from(s);
                let stmt = Stmt { kind, span, trivia: Trivia::default() };
                Some(Block { stmts: vec![stmt], dangling: Vec::new(), span, braced: false })
            } else {
                Some(self.body()?)
            }
        } else {
            None
        };
        Ok(StmtKind::If { cond, then_block, else_block, header_span })
    }

    fn when_stmt(&mut self) -> PResult<StmtKind> {
        let kw = self.expect(Tok::When)?;
        let (subject, header_span) = if self.at(&Tok::LParen) {
            let (e, sp) = self.paren_cond()?;
            (Some(e), sp)
        } else {
            (None, kw.span)
        };
        self.expect(Tok::LBrace)?;
        let saved_depth = std::mem::replace(&mut self.depth, 0);
        let mut branches = Vec::new();
        loop {
            while self.at(&Tok::Semi) {
                self.advance();
            }
            if self.at(&Tok::RBrace) || self.at(&Tok::Eof) {
                break;
            }
            let leading = self.take_leading();
            let bstart = self.start();
            let conditions = if self.at(&Tok::Else) {
                self.advance();
                Vec::new()
            } else {
                let mut cs = vec![self.expr()?];
                while self.at(&Tok::Comma) {
                    self.advance();
                    cs.push(self.expr()?);
                }
                cs
            };
            let cond_span = self.span_from(bstart);
            self.expect(Tok::Arrow)?;
            let body = self.body()?;
            let span = self.span_from(bstart);
            let trailing = self.take_trailing();
            if self.at(&Tok::Semi) {
                self.advance();
            } else if !(self.at(&Tok::RBrace) || self.cur().newline_before) {
                return Err(self.error_here("newline or `;` after `when` branch"));
            }
            branches.push(WhenBranch { conditions, body, span, cond_span, trivia: Trivia { leading, trailing } });
        }
        // Comments before the closing brace of a `when` go with the last
        // branch so they are not lost.
        let dangling = self.take_leading();
        if let Some(last) = branches.last_mut() {
            last.body.dangling.extend(dangling);
        } else {
            self.pending.extend(dangling);
        }
        self.expect(Tok::RBrace)?;
        self.depth = saved_depth;
        Ok(StmtKind::When { subject, branches, header_span })
    }

    /// Body of a control structure: a braced block or a single statement.
    fn body(&mut self) -> PResult<Block> {
        if self.at(&Tok::LBrace) {
            return self.block();
        }
        let saved_depth = std::mem::replace(&mut self.depth, 0);
        let s = self.statement();
        self.depth = saved_depth;
        let s = s?;
        let span = s.span;
        Ok(Block { stmts: vec![s], dangling: Vec::new(), span, braced: false })
    }

    fn expr(&mut self) -> PResult<Expr> {
        self.binary(1)
    }

    fn binary(&mut self, min_prec: u8) -> PResult<Expr> {
        let mut lhs = self.prefix()?;
        while let Some(op) = binop(self.tok()) {
            let prec = op.precedence();
            if prec < min_prec {
                break;
            }
            if self.cur().newline_before && self.depth == 0 && !matches!(op, BinaryOp::And | BinaryOp::Or) {
                break;
            }
            self.advance();
            let rhs = self.binary(prec + 1)?;
            let span = lhs.span.to(rhs.span);
            lhs = Expr { kind: ExprKind::Binary { op, lhs: Box::new(lhs), rhs: Box::new(rhs) }, span };
        }
        Ok(lhs)
    }

    fn prefix(&mut self) -> PResult<Expr> {
        let start = self.start();
        let op = match self.tok() {
            Tok::Minus => Some(UnaryOp::Neg),
            Tok::Bang => Some(UnaryOp::Not),
            _ => None,
        };
        if let Some(op) = op {
            self.advance();
            let operand = self.prefix()?;
            return Ok(Expr {
                kind: ExprKind::Unary { op, operand: Box::new(operand) },
                span: self.span_from(start),
            });
        }
        let primary = self.primary()?;
        self.postfix(primary)
    }

    fn postfix(&mut self, mut e: Expr) -> PResult<Expr> {
        while self.at(&Tok::Dot) {
            let start = e.span.start;
            self.advance();
            let (name, _) = self.ident("member name")?;
            if self.at(&Tok::LParen) && !self.cur().newline_before {
                let args = self.call_args()?;
                e = Expr {
                    kind: ExprKind::Call { receiver: Some(Box::new(e)), name, args },
                    span: self.span_from(start),
                };
            } else {
                e = Expr { kind: ExprKind::Member { receiver: Box::new(e), name }, span: self.span_from(start) };
            }
        }
        Ok(e)
    }

    fn call_args(&mut self) -> PResult<Vec<Expr>> {
        self.expect(Tok::LParen)?;
        self.depth += 1;
        let mut args = Vec::new();
        let r = (|| {
            while !self.at(&Tok::RParen) {
                args.push(self.expr()?);
                if self.at(&Tok::Comma) {
                    self.advance();
                } else if !self.at(&Tok::RParen) {
                    return Err(self.error_here("`,` or `)`"));
                }
            }
            Ok(())
        })();
        self.depth -= 1;
        r?;
        self.expect(Tok::RParen)?;
        Ok(args)
    }

    fn primary(&mut self) -> PResult<Expr> {
        let start = self.start();
        let kind = match self.tok().clone() {
            Tok::Int(v) => {
                self.advance();
                ExprKind::Int(v)
            }
            Tok::Str(s) => {
                self.advance();
                ExprKind::Str(s)
            }
            Tok::True => {
                self.advance();
                ExprKind::Bool(true)
            }
            Tok::False => {
                self.advance();
                ExprKind::Bool(false)
            }
            Tok::Ident(name) => {
                self.advance();
                if self.at(&Tok::LParen) && !self.cur().newline_before {
                    let args = self.call_args()?;
                    ExprKind::Call { receiver: None, name, args }
                } else {
                    ExprKind::Name(name)
                }
            }
            Tok::LParen => {
                self.advance();
                let inner = self.paren_expr_inner()?;
                self.expect(Tok::RParen)?;
                // Parentheses are not kept in the tree; the printer
                // re-inserts them from precedence.
                let mut e = inner;
                e.span = self.span_from(start);
                return Ok(e);
            }
            _ => return Err(self.error_here("expression")),
        };
        Ok(Expr { kind, span: self.span_from(start) })
    }
}

fn is_assign_op(t: &Tok) -> bool {
    matches!(
        t,
        Tok::Assign | Tok::PlusAssign | Tok::MinusAssign | Tok::StarAssign | Tok::SlashAssign | Tok::PercentAssign
    )
}

fn binop(t: &Tok) -> Option<BinaryOp> {
    Some(match t {
        Tok::OrOr => BinaryOp::Or,
        Tok::AndAnd => BinaryOp::And,
        Tok::EqEq => BinaryOp::Eq,
        Tok::NotEq => BinaryOp::Ne,
        Tok::Lt => BinaryOp::Lt,
        Tok::Le => BinaryOp::Le,
        Tok::Gt => BinaryOp::Gt,
        Tok::Ge => BinaryOp::Ge,
        Tok::In => BinaryOp::In,
        Tok::NotIn => BinaryOp::NotIn,
        Tok::DotDot => BinaryOp::Range,
        Tok::Plus => BinaryOp::Add,
        Tok::Minus => BinaryOp::Sub,
        Tok::Star => BinaryOp::Mul,
        Tok::Slash => BinaryOp::Div,
        Tok::Percent => BinaryOp::Rem,
        _ => return None,
    })
}
