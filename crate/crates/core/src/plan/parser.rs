//! Lexer and recursive-descent parser for plan source text.
//!
//! ```text
//! program   = { statement } ;
//! statement = "let" IDENT "=" expr
//!           | "for" IDENT "in" expr "{" { statement } "}"
//!           | "emit" [ IDENT "=" ] expr
//!           | COMMENT ;                       (* "#" to end of line *)
//! expr      = primary { "." ( IDENT | STRING ) } ;
//! primary   = STRING | INTEGER | REAL
//!           | "[" [ expr { "," expr } [ "," ] ] "]"
//!           | "{" [ key ":" expr { "," key ":" expr } [ "," ] ] "}"
//!           | IDENT "(" [ IDENT "=" expr { "," IDENT "=" expr } [ "," ] ] ")"
//!           | IDENT ;
//! key       = IDENT | STRING ;
//! ```
//!
//! Statements end at a newline or `;`. Newlines are insignificant inside
//! brackets, braces and parentheses.

use alloc::boxed::Box;
use alloc::format;
use alloc::string::{String, ToString};
use alloc::vec::Vec;

use super::ast::*;
use super::diagnostic::{codes, Diagnostic};

#[derive(Clone, Debug, PartialEq)]
enum Tok {
    Ident(String),
    Let,
    For,
    In,
    Emit,
    Str(String),
    Int(i64),
    Real(f64),
    Comment(String),
    Newline,
    Semi,
    Eq,
    LParen,
    RParen,
    LBracket,
    RBracket,
    LBrace,
    RBrace,
    Comma,
    Colon,
    Dot,
    Eof,
}

impl Tok {
    fn describe(&self) -> String {
        match self {
            Tok::Ident(s) => format!("identifier `{s}`"),
            Tok::Let => "`let`".into(),
            Tok::For => "`for`".into(),
            Tok::In => "`in`".into(),
            Tok::Emit => "`emit`".into(),
            Tok::Str(_) => "string".into(),
            Tok::Int(_) | Tok::Real(_) => "number".into(),
            Tok::Comment(_) => "comment".into(),
            Tok::Newline => "end of line".into(),
            Tok::Semi => "`;`".into(),
            Tok::Eq => "`=`".into(),
            Tok::LParen => "`(`".into(),
            Tok::RParen => "`)`".into(),
            Tok::LBracket => "`[`".into(),
            Tok::RBracket => "`]`".into(),
            Tok::LBrace => "`{`".into(),
            Tok::RBrace => "`}`".into(),
            Tok::Comma => "`,`".into(),
            Tok::Colon => "`:`".into(),
            Tok::Dot => "`.`".into(),
            Tok::Eof => "end of input".into(),
        }
    }
}

pub const KEYWORDS: [&str; 4] = ["let", "for", "in", "emit"];

pub fn is_identifier(s: &str) -> bool {
    let mut cs = s.chars();
    matches!(cs.next(), Some(c) if c.is_ascii_alphabetic() || c == '_')
        && cs.all(|c| c.is_ascii_alphanumeric() || c == '_')
        && !KEYWORDS.contains(&s)
}

struct Lexer<'a> {
    chars: Vec<char>,
    pos: usize,
    line: u32,
    col: u32,
    out: Vec<(Tok, Span)>,
    diags: &'a mut Vec<Diagnostic>,
}

impl Lexer<'_> {
    fn peek(&self, off: usize) -> Option<char> {
        self.chars.get(self.pos + off).copied()
    }

    fn bump(&mut self) -> Option<char> {
        let c = self.chars.get(self.pos).copied()?;
        self.pos += 1;
        if c == '\n' {
            self.line += 1;
            self.col = 1;
        } else {
            self.col += 1;
        }
        Some(c)
    }

    fn run(mut self) -> Vec<(Tok, Span)> {
        while let Some(c) = self.peek(0) {
            let (line, col) = (self.line, self.col);
            let start = self.pos;
            let span_from = |lx: &Self| Span::new(line, col, (lx.pos - start) as u32);
            match c {
                ' ' | '\t' | '\r' => {
                    self.bump();
                }
                '\n' => {
                    self.bump();
                    self.out.push((Tok::Newline, Span::new(line, col, 1)));
                }
                '#' => {
                    self.bump();
                    if self.peek(0) == Some(' ') {
                        self.bump();
                    }
                    let mut text = String::new();
                    while let Some(c) = self.peek(0) {
                        if c == '\n' {
                            break;
                        }
                        text.push(c);
                        self.bump();
                    }
                    if text.ends_with('\r') {
                        text.pop();
                    }
                    let sp = span_from(&self);
                    self.out.push((Tok::Comment(text), sp));
                }
                '"' => self.string(line, col, start),
                c if c.is_ascii_digit()
                    || (c == '-' && self.peek(1).is_some_and(|d| d.is_ascii_digit())) =>
                {
                    self.number(line, col, start)
                }
                c if c.is_ascii_alphabetic() || c == '_' => {
                    let mut s = String::new();
                    while let Some(c) = self.peek(0) {
                        if c.is_ascii_alphanumeric() || c == '_' {
                            s.push(c);
                            self.bump();
                        } else {
                            break;
                        }
                    }
                    let tok = match s.as_str() {
                        "let" => Tok::Let,
                        "for" => Tok::For,
                        "in" => Tok::In,
                        "emit" => Tok::Emit,
                        _ => Tok::Ident(s),
                    };
                    let sp = span_from(&self);
                    self.out.push((tok, sp));
                }
                _ => {
                    self.bump();
                    let tok = match c {
                        ';' => Tok::Semi,
                        '=' => Tok::Eq,
                        '(' => Tok::LParen,
                        ')' => Tok::RParen,
                        '[' => Tok::LBracket,
                        ']' => Tok::RBracket,
                        '{' => Tok::LBrace,
                        '}' => Tok::RBrace,
                        ',' => Tok::Comma,
                        ':' => Tok::Colon,
                        '.' => Tok::Dot,
                        other => {
                            self.diags.push(Diagnostic::error(
                                codes::UNEXPECTED_CHAR,
                                format!("unexpected character `{}`", other.escape_debug()),
                                Span::new(line, col, 1),
                            ));
                            continue;
                        }
                    };
                    self.out.push((tok, Span::new(line, col, 1)));
                }
            }
        }
        self.out.push((Tok::Eof, Span::new(self.line, self.col, 0)));
        self.out
    }

    fn string(&mut self, line: u32, col: u32, start: usize) {
        self.bump();
        let mut s = String::new();
        loop {
            match self.bump() {
                None | Some('\n') => {
                    self.diags.push(Diagnostic::error(
                        codes::UNTERMINATED_STRING,
                        "unterminated string literal",
                        Span::new(line, col, (self.pos - start) as u32),
                    ));
                    // keep line structure for later statements
                    if self.chars.get(self.pos.wrapping_sub(1)) == Some(&'\n') {
                        self.out
                            .push((Tok::Newline, Span::new(self.line - 1, 1, 1)));
                    }
                    return;
                }
                Some('"') => break,
                Some('\\') => {
                    let esc_col = self.col - 1;
                    match self.bump() {
                        Some('"') => s.push('"'),
                        Some('\\') => s.push('\\'),
                        Some('n') => s.push('\n'),
                        Some('t') => s.push('\t'),
                        Some('r') => s.push('\r'),
                        Some('u') if self.peek(0) == Some('{') => {
                            self.bump();
                            let mut hex = String::new();
                            while let Some(c) = self.peek(0) {
                                if c == '}' {
                                    break;
                                }
                                hex.push(c);
                                self.bump();
                            }
                            self.bump();
                            match u32::from_str_radix(&hex, 16).ok().and_then(char::from_u32) {
                                Some(c) => s.push(c),
                                None => self.diags.push(Diagnostic::error(
                                    codes::BAD_ESCAPE,
                                    format!("invalid unicode escape `\\u{{{hex}}}`"),
                                    Span::new(self.line, esc_col, hex.len() as u32 + 4),
                                )),
                            }
                        }
                        other => self.diags.push(Diagnostic::error(
                            codes::BAD_ESCAPE,
                            format!(
                                "unknown escape `\\{}`",
                                other
                                    .map(|c| c.escape_debug().to_string())
                                    .unwrap_or_default()
                            ),
                            Span::new(self.line, esc_col, 2),
                        )),
                    }
                }
                Some(c) => s.push(c),
            }
        }
        self.out
            .push((Tok::Str(s), Span::new(line, col, (self.pos - start) as u32)));
    }

    fn number(&mut self, line: u32, col: u32, start: usize) {
        let mut s = String::new();
        if self.peek(0) == Some('-') {
            s.push('-');
            self.bump();
        }
        let mut is_real = false;
        while let Some(c) = self.peek(0) {
            if c.is_ascii_digit() {
                s.push(c);
                self.bump();
            } else if c == '.'
                && !is_real
                && self.peek(1).is_some_and(|d| d.is_ascii_digit())
                && !s.contains('e')
            {
                is_real = true;
                s.push(c);
                self.bump();
            } else if (c == 'e' || c == 'E') && !s.contains('e') {
                let exp_digit = match self.peek(1) {
                    Some('+') | Some('-') => self.peek(2).is_some_and(|d| d.is_ascii_digit()),
                    Some(d) => d.is_ascii_digit(),
                    None => false,
                };
                if !exp_digit {
                    break;
                }
                is_real = true;
                s.push('e');
                self.bump();
                if let Some(sign @ ('+' | '-')) = self.peek(0) {
                    s.push(sign);
                    self.bump();
                }
            } else {
                break;
            }
        }
        let span = Span::new(line, col, (self.pos - start) as u32);
        let tok = if is_real {
            s.parse::<f64>()
                .ok()
                .filter(|v| v.is_finite())
                .map(Tok::Real)
        } else {
            s.parse::<i64>().ok().map(Tok::Int)
        };
        match tok {
            Some(t) => self.out.push((t, span)),
            None => {
                self.diags.push(Diagnostic::error(
                    codes::BAD_NUMBER,
                    format!("number `{s}` is out of range"),
                    span,
                ));
                self.out.push((Tok::Int(0), span));
            }
        }
    }
}

struct Parser {
    toks: Vec<(Tok, Span)>,
    pos: usize,
    diags: Vec<Diagnostic>,
}

type PResult<T> = Result<T, ()>;

impl Parser {
    fn peek(&self) -> &Tok {
        &self.toks[self.pos].0
    }

    fn peek_at(&self, off: usize) -> &Tok {
        &self.toks[(self.pos + off).min(self.toks.len() - 1)].0
    }

    fn span(&self) -> Span {
        self.toks[self.pos].1
    }

    fn prev_span(&self) -> Span {
        self.toks[self.pos.saturating_sub(1)].1
    }

    fn bump(&mut self) -> (Tok, Span) {
        let t = self.toks[self.pos].clone();
        if self.pos + 1 < self.toks.len() {
            self.pos += 1;
        }
        t
    }

    fn error<T>(&mut self, expected: &str) -> PResult<T> {
        let (tok, span) = self.toks[self.pos].clone();
        self.diags.push(Diagnostic::error(
            codes::UNEXPECTED_TOKEN,
            format!("expected {expected}, found {}", tok.describe()),
            span,
        ));
        Err(())
    }

    fn expect(&mut self, tok: Tok, what: &str) -> PResult<Span> {
        if *self.peek() == tok {
            Ok(self.bump().1)
        } else {
            self.error(what)
        }
    }

    fn skip_layout(&mut self) {
        while matches!(self.peek(), Tok::Newline | Tok::Comment(_)) {
            self.bump();
        }
    }

    fn ident(&mut self, what: &str) -> PResult<Ident> {
        match self.peek().clone() {
            Tok::Ident(s) => {
                let sp = self.bump().1;
                Ok(Spanned::new(s, sp))
            }
            _ => self.error(what),
        }
    }

    /// Skips to the end of the current statement.
    fn recover(&mut self) {
        let mut depth = 0i32;
        loop {
            match self.peek() {
                Tok::Eof => return,
                Tok::Newline | Tok::Semi if depth <= 0 => return,
                Tok::RBrace if depth <= 0 => return,
                Tok::LParen | Tok::LBracket | Tok::LBrace => depth += 1,
                Tok::RParen | Tok::RBracket | Tok::RBrace => depth -= 1,
                _ => {}
            }
            self.bump();
        }
    }

    fn block(&mut self, top: bool) -> Vec<StmtNode> {
        let mut out = Vec::new();
        loop {
            while matches!(self.peek(), Tok::Newline | Tok::Semi) {
                self.bump();
            }
            match self.peek() {
                Tok::Eof => {
                    if !top {
                        let _ = self.error::<()>("`}`");
                    }
                    return out;
                }
                Tok::RBrace if !top => return out,
                Tok::RBrace => {
                    let _ = self.error::<()>("a statement");
                    self.bump();
                    continue;
                }
                Tok::Comment(text) => {
                    let text = text.clone();
                    let sp = self.bump().1;
                    out.push(Spanned::new(Statement::Comment(text), sp));
                    continue;
                }
                _ => {}
            }
            match self.statement() {
                Ok(s) => {
                    out.push(s);
                    match self.peek() {
                        Tok::Newline | Tok::Semi | Tok::Comment(_) | Tok::Eof => {}
                        Tok::RBrace if !top => {}
                        _ => {
                            let _ = self.error::<()>("end of statement");
                            self.recover();
                        }
                    }
                }
                Err(()) => self.recover(),
            }
        }
    }

    fn statement(&mut self) -> PResult<StmtNode> {
        let start = self.span();
        match self.peek() {
            Tok::Let => {
                self.bump();
                let name = self.ident("a name after `let`")?;
                self.expect(Tok::Eq, "`=`")?;
                let value = self.expr()?;
                let sp = start.to(value.span);
                Ok(Spanned::new(Statement::Let { name, value }, sp))
            }
            Tok::For => {
                self.bump();
                let var = self.ident("a loop variable after `for`")?;
                self.expect(Tok::In, "`in`")?;
                let iter = self.expr()?;
                self.expect(Tok::LBrace, "`{`")?;
                let body = self.block(false);
                self.expect(Tok::RBrace, "`}`")?;
                let sp = start.to(iter.span);
                Ok(Spanned::new(Statement::ForEach { var, iter, body }, sp))
            }
            Tok::Emit => {
                self.bump();
                let binding = if matches!(self.peek(), Tok::Ident(_)) && *self.peek_at(1) == Tok::Eq
                {
                    let b = self.ident("a name")?;
                    self.bump();
                    Some(b)
                } else {
                    None
                };
                let call = self.expr()?;
                let sp = start.to(call.span);
                Ok(Spanned::new(Statement::Emit { binding, call }, sp))
            }
            _ => self.error("`let`, `for`, `emit` or a comment"),
        }
    }

    fn expr(&mut self) -> PResult<ExprNode> {
        let mut e = self.primary()?;
        while *self.peek() == Tok::Dot {
            self.bump();
            let key = match self.peek().clone() {
                Tok::Ident(s) => Spanned::new(s, self.bump().1),
                Tok::Str(s) => Spanned::new(s, self.bump().1),
                Tok::Let | Tok::For | Tok::In | Tok::Emit => {
                    let (t, sp) = self.bump();
                    let s = match t {
                        Tok::Let => "let",
                        Tok::For => "for",
                        Tok::In => "in",
                        _ => "emit",
                    };
                    Spanned::new(s.to_string(), sp)
                }
                _ => return self.error("a field name after `.`"),
            };
            let sp = e.span.to(key.span);
            e = Spanned::new(Expr::Field(Box::new(e), key), sp);
        }
        Ok(e)
    }

    fn primary(&mut self) -> PResult<ExprNode> {
        let start = self.span();
        match self.peek().clone() {
            Tok::Str(s) => {
                self.bump();
                Ok(Spanned::new(Expr::Text(s), start))
            }
            Tok::Int(v) => {
                self.bump();
                Ok(Spanned::new(Expr::Integer(v), start))
            }
            Tok::Real(v) => {
                self.bump();
                Ok(Spanned::new(Expr::Real(v), start))
            }
            Tok::LBracket => {
                self.bump();
                let mut items = Vec::new();
                loop {
                    self.skip_layout();
                    if *self.peek() == Tok::RBracket {
                        break;
                    }
                    items.push(self.expr()?);
                    self.skip_layout();
                    if *self.peek() == Tok::Comma {
                        self.bump();
                    } else {
                        break;
                    }
                }
                self.skip_layout();
                self.expect(Tok::RBracket, "`,` or `]`")?;
                Ok(Spanned::new(Expr::List(items), start.to(self.prev_span())))
            }
            Tok::LBrace => {
                self.bump();
                let mut fields = Vec::new();
                loop {
                    self.skip_layout();
                    let key = match self.peek().clone() {
                        Tok::RBrace => break,
                        Tok::Ident(s) | Tok::Str(s) => Spanned::new(s, self.bump().1),
                        _ => return self.error("a field name or `}`"),
                    };
                    self.skip_layout();
                    self.expect(Tok::Colon, "`:`")?;
                    self.skip_layout();
                    let v = self.expr()?;
                    fields.push((key, v));
                    self.skip_layout();
                    if *self.peek() == Tok::Comma {
                        self.bump();
                    } else {
                        break;
                    }
                }
                self.skip_layout();
                self.expect(Tok::RBrace, "`,` or `}`")?;
                Ok(Spanned::new(
                    Expr::Record(fields),
                    start.to(self.prev_span()),
                ))
            }
            Tok::Ident(name) => {
                self.bump();
                if *self.peek() != Tok::LParen {
                    return Ok(Spanned::new(Expr::Var(name), start));
                }
                self.bump();
                let mut args = Vec::new();
                loop {
                    self.skip_layout();
                    if *self.peek() == Tok::RParen {
                        break;
                    }
                    let arg = match self.peek().clone() {
                        Tok::Ident(s) => Spanned::new(s, self.bump().1),
                        Tok::Str(_) | Tok::Int(_) | Tok::Real(_) | Tok::LBracket | Tok::LBrace => {
                            let sp = self.span();
                            self.diags.push(Diagnostic::error(
                                codes::UNEXPECTED_TOKEN,
                                format!("arguments of `{name}` must be named, as in `name=value`"),
                                sp,
                            ));
                            return Err(());
                        }
                        _ => return self.error("an argument name"),
                    };
                    self.skip_layout();
                    self.expect(Tok::Eq, "`=` after the argument name")?;
                    self.skip_layout();
                    let v = self.expr()?;
                    args.push((arg, v));
                    self.skip_layout();
                    if *self.peek() == Tok::Comma {
                        self.bump();
                    } else {
                        break;
                    }
                }
                self.skip_layout();
                self.expect(Tok::RParen, "`,` or `)`")?;
                let call = ToolCall {
                    tool: Spanned::new(name, start),
                    args,
                };
                Ok(Spanned::new(Expr::Call(call), start.to(self.prev_span())))
            }
            _ => self.error("an expression"),
        }
    }
}

/// Parses plan source. On failure every error found is returned; parsing
/// continues after a bad statement to report later ones too.
pub fn parse(source: &str) -> Result<PlanProgram, Vec<Diagnostic>> {
    let mut diags = Vec::new();
    let toks = Lexer {
        chars: source.chars().collect(),
        pos: 0,
        line: 1,
        col: 1,
        out: Vec::new(),
        diags: &mut diags,
    }
    .run();
    let mut p = Parser {
        toks,
        pos: 0,
        diags: Vec::new(),
    };
    let statements = p.block(true);
    diags.extend(p.diags);
    if diags.iter().any(Diagnostic::is_error) {
        diags.sort_by_key(|d| (d.span.line, d.span.column));
        Err(diags)
    } else {
        Ok(PlanProgram { statements })
    }
}
