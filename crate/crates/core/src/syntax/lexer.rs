use super::ast::{Comment, CommentKind, Pos, Span};
use super::ParseError;

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Tok {
    Ident(String),
    Int(i64),
    Str(String),
    // keywords
    Fun,
    Val,
    Var,
    If,
    Else,
    When,
    For,
    In,
    While,
    Do,
    Return,
    True,
    False,
    // punctuation
    LParen,
    RParen,
    LBrace,
    RBrace,
    Comma,
    Colon,
    Semi,
    Assign,
    PlusAssign,
    MinusAssign,
    StarAssign,
    SlashAssign,
    PercentAssign,
    Plus,
    Minus,
    Star,
    Slash,
    Percent,
    EqEq,
    NotEq,
    Lt,
    Le,
    Gt,
    Ge,
    AndAnd,
    OrOr,
    Bang,
    NotIn,
    DotDot,
    Dot,
    Arrow,
    Eof,
}

impl Tok {
    pub fn describe(&self) -> String {
        match self {
            Tok::Ident(s) => format!("identifier `{s}`"),
            Tok::Int(v) => format!("integer `{v}`"),
            Tok::Str(_) => "string literal".to_string(),
            Tok::Eof => "end of file".to_string(),
            other => format!("`{}`", other.text()),
        }
    }

    pub fn text(&self) -> &'static str {
        match self {
            Tok::Fun => "fun",
            Tok::Val => "val",
            Tok::Var => "var",
            Tok::If => "if",
            Tok::Else => "else",
            Tok::When => "when",
            Tok::For => "for",
            Tok::In => "in",
            Tok::While => "while",
            Tok::Do => "do",
            Tok::Return => "return",
            Tok::True => "true",
            Tok::False => "false",
            Tok::LParen => "(",
            Tok::RParen => ")",
            Tok::LBrace => "{",
            Tok::RBrace => "}",
            Tok::Comma => ",",
            Tok::Colon => ":",
            Tok::Semi => ";",
            Tok::Assign => "=",
            Tok::PlusAssign => "+=",
            Tok::MinusAssign => "-=",
            Tok::StarAssign => "*=",
            Tok::SlashAssign => "/=",
            Tok::PercentAssign => "%=",
            Tok::Plus => "+",
            Tok::Minus => "-",
            Tok::Star => "*",
            Tok::Slash => "/",
            Tok::Percent => "%",
            Tok::EqEq => "==",
            Tok::NotEq => "!=",
            Tok::Lt => "<",
            Tok::Le => "<=",
            Tok::Gt => ">",
            Tok::Ge => ">=",
            Tok::AndAnd => "&&",
            Tok::OrOr => "||",
            Tok::Bang => "!",
            Tok::NotIn => "!in",
            Tok::DotDot => "..",
            Tok::Dot => ".",
            Tok::Arrow => "->",
            Tok::Ident(_) | Tok::Int(_) | Tok::Str(_) | Tok::Eof => "",
        }
    }
}

/// A comment preceding a token. `same_line` is set when no line break
/// separates it from the previous token.
#[derive(Debug, Clone)]
pub struct PendingComment {
    pub comment: Comment,
    pub same_line: bool,
}

#[derive(Debug, Clone)]
pub struct Token {
    pub tok: Tok,
    pub span: Span,
    pub newline_before: bool,
    pub comments: Vec<PendingComment>,
}

pub fn is_ident_start(c: char) -> bool {
    c.is_alphabetic() || c == '_'
}

pub fn is_ident_continue(c: char) -> bool {
    c.is_alphanumeric() || c == '_'
}

fn keyword(s: &str) -> Option<Tok> {
    Some(match s {
        "fun" => Tok::Fun,
        "val" => Tok::Val,
        "var" => Tok::Var,
        "if" => Tok::If,
        "else" => Tok::Else,
        "when" => Tok::When,
        "for" => Tok::For,
        "in" => Tok::In,
        "while" => Tok::While,
        "do" => Tok::Do,
        "return" => Tok::Return,
        "true" => Tok::True,
        "false" => Tok::False,
        _ => return None,
    })
}

struct Lexer<'a> {
    src: &'a str,
    chars: Vec<(usize, char)>,
    i: usize,
    line: u32,
    col: u32,
}

impl<'a> Lexer<'a> {
    fn pos(&self) -> Pos {
        let offset = self.chars.get(self.i).map(|c| c.0).unwrap_or(self.src.len());
        Pos { line: self.line, column: self.col, offset: offset as u32 }
    }

    fn peek(&self) -> Option<char> {
        self.chars.get(self.i).map(|c| c.1)
    }

    fn peek_at(&self, n: usize) -> Option<char> {
        self.chars.get(self.i + n).map(|c| c.1)
    }

    fn bump(&mut self) -> Option<char> {
        let c = self.peek()?;
        self.i += 1;
        if c == '\n' {
            self.line += 1;
            self.col = 1;
        } else {
            self.col += 1;
        }
        Some(c)
    }

    fn error(&self, pos: Pos, message: impl Into<String>) -> ParseError {
        ParseError { line: pos.line, column: pos.column, message: message.into() }
    }
}

pub fn tokenize(src: &str) -> Result<Vec<Token>, ParseError> {
    let mut lx = Lexer { src, chars: src.char_indices().collect(), i: 0, line: 1, col: 1 };
    let mut out: Vec<Token> = Vec::new();
    let mut comments: Vec<PendingComment> = Vec::new();
    // Line break seen since the previous token (or since the previous comment
    // for the purposes of `same_line`).
    let mut newline_since_token = true;
    let mut first_token = true;

    while let Some(c) = lx.peek() {
        if c == '\n' {
            lx.bump();
            newline_since_token = true;
            continue;
        }
        if c.is_whitespace() {
            lx.bump();
            continue;
        }
        let start = lx.pos();
        if c == '/' && lx.peek_at(1) == Some('/') {
            while let Some(c) = lx.peek() {
                if c == '\n' {
                    break;
                }
                lx.bump();
            }
            let end = lx.pos();
            let span = Span::new(start, end);
            comments.push(PendingComment {
                comment: Comment { kind: CommentKind::Line, text: span.slice(src).to_string(), span },
                same_line: !newline_since_token && !first_token,
            });
            continue;
        }
        if c == '/' && lx.peek_at(1) == Some('*') {
            lx.bump();
            lx.bump();
            let mut depth = 1;
            loop {
                match (lx.peek(), lx.peek_at(1)) {
                    (None, _) => return Err(lx.error(start, "unterminated block comment")),
                    (Some('*'), Some('/')) => {
                        lx.bump();
                        lx.bump();
                        depth -= 1;
                        if depth == 0 {
                            break;
                        }
                    }
                    (Some('/'), Some('*')) => {
                        lx.bump();
                        lx.bump();
                        depth += 1;
                    }
                    _ => {
                        lx.bump();
                    }
                }
            }
            let end = lx.pos();
            let span = Span::new(start, end);
            comments.push(PendingComment {
                comment: Comment { kind: CommentKind::Block, text: span.slice(src).to_string(), span },
                same_line: !newline_since_token && !first_token,
            });
            continue;
        }

        let tok = if is_ident_start(c) {
            let mut s = String::new();
            while let Some(c) = lx.peek() {
                if !is_ident_continue(c) {
                    break;
                }
                s.push(c);
                lx.bump();
            }
            keyword(&s).unwrap_or(Tok::Ident(s))
        } else if c.is_ascii_digit() {
            let mut s = String::new();
            while let Some(c) = lx.peek() {
                if c.is_ascii_digit() {
                    s.push(c);
                } else if c != '_' {
                    break;
                }
                lx.bump();
            }
            if matches!(lx.peek(), Some(c) if is_ident_start(c))
                || (lx.peek() == Some('.') && matches!(lx.peek_at(1), Some(d) if d.is_ascii_digit()))
            {
                return Err(lx.error(start, "only decimal integer literals are supported"));
            }
            let v = s
                .parse::<i64>()
                .map_err(|_| lx.error(start, format!("integer literal `{s}` out of range")))?;
            Tok::Int(v)
        } else if c == '"' {
            lex_string(&mut lx, start)?
        } else {
            lex_punct(&mut lx, start)?
        };
        let end = lx.pos();
        out.push(Token {
            tok,
            span: Span::new(start, end),
            newline_before: newline_since_token && !first_token,
            comments: std::mem::take(&mut comments),
        });
        newline_since_token = false;
        first_token = false;
    }
    let p = lx.pos();
    out.push(Token {
        tok: Tok::Eof,
        span: Span::new(p, p),
        newline_before: true,
        comments,
    });
    Ok(out)
}

fn lex_string(lx: &mut Lexer<'_>, start: Pos) -> Result<Tok, ParseError> {
    lx.bump();
    if lx.peek() == Some('"') && lx.peek_at(1) == Some('"') {
        return Err(lx.error(start, "raw string literals are not supported"));
    }
    let mut s = String::new();
    loop {
        let here = lx.pos();
        match lx.bump() {
            None | Some('\n') => return Err(lx.error(start, "unterminated string literal")),
            Some('"') => break,
            Some('\\') => {
                let c = lx.bump().ok_or_else(|| lx.error(here, "unterminated escape"))?;
                match c {
                    'n' => s.push('\n'),
                    't' => s.push('\t'),
                    'r' => s.push('\r'),
                    'b' => s.push('\u{8}'),
                    '"' => s.push('"'),
                    '\'' => s.push('\''),
                    '\\' => s.push('\\'),
                    '$' => s.push('$'),
                    'u' => {
                        let mut hex = String::new();
                        for _ in 0..4 {
                            hex.push(lx.bump().ok_or_else(|| lx.error(here, "bad unicode escape"))?);
                        }
                        let v = u32::from_str_radix(&hex, 16)
                            .ok()
                            .and_then(char::from_u32)
                            .ok_or_else(|| lx.error(here, "bad unicode escape"))?;
                        s.push(v);
                    }
                    other => return Err(lx.error(here, format!("unknown escape `\\{other}`"))),
                }
            }
            Some('$') if matches!(lx.peek(), Some(c) if is_ident_start(c) || c == '{') => {
                return Err(lx.error(here, "string templates are not supported"));
            }
            Some(c) => s.push(c),
        }
    }
    Ok(Tok::Str(s))
}

fn lex_punct(lx: &mut Lexer<'_>, start: Pos) -> Result<Tok, ParseError> {
    let c = lx.peek().unwrap_or('\0');
    let n = lx.peek_at(1);
    let two = |t: Tok, lx: &mut Lexer<'_>| {
        lx.bump();
        lx.bump();
        t
    };
    let tok = match (c, n) {
        ('=', Some('=')) => two(Tok::EqEq, lx),
        ('!', Some('=')) => two(Tok::NotEq, lx),
        ('<', Some('=')) => two(Tok::Le, lx),
        ('>', Some('=')) => two(Tok::Ge, lx),
        ('&', Some('&')) => two(Tok::AndAnd, lx),
        ('|', Some('|')) => two(Tok::OrOr, lx),
        ('.', Some('.')) => two(Tok::DotDot, lx),
        ('-', Some('>')) => two(Tok::Arrow, lx),
        ('+', Some('=')) => two(Tok::PlusAssign, lx),
        ('-', Some('=')) => two(Tok::MinusAssign, lx),
        ('*', Some('=')) => two(Tok::StarAssign, lx),
        ('/', Some('=')) => two(Tok::SlashAssign, lx),
        ('%', Some('=')) => two(Tok::PercentAssign, lx),
        ('+', Some('+')) | ('-', Some('-')) => {
            return Err(lx.error(start, "increment/decrement operators are not supported"))
        }
        ('!', Some('i'))
            if lx.peek_at(2) == Some('n') && !matches!(lx.peek_at(3), Some(c) if is_ident_continue(c)) =>
        {
            lx.bump();
            lx.bump();
            lx.bump();
            Tok::NotIn
        }
        _ => {
            let t = match c {
                '(' => Tok::LParen,
                ')' => Tok::RParen,
                '{' => Tok::LBrace,
                '}' => Tok::RBrace,
                ',' => Tok::Comma,
                ':' => Tok::Colon,
                ';' => Tok::Semi,
                '=' => Tok::Assign,
                '+' => Tok::Plus,
                '-' => Tok::Minus,
                '*' => Tok::Star,
                '/' => Tok::Slash,
                '%' => Tok::Percent,
                '<' => Tok::Lt,
                '>' => Tok::Gt,
                '!' => Tok::Bang,
                '.' => Tok::Dot,
                other => return Err(lx.error(start, format!("unexpected character `{other}`"))),
            };
            lx.bump();
            t
        }
    };
    Ok(tok)
}
