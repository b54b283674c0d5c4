//! Concrete syntax.
//!
//! ```text
//! var x, y;
//! prop p;
//! # comment
//! G (p -> X x = x + 1) & F (x >= 3)
//! ```
//!
//! Precedence, tightest first: unary `! X Y Z G F H O`, binary temporal
//! `U S R T` (right associative), `&`, `|`, `->` (right associative).
//! Inside terms `X`/`Y` shift a variable; `next(x)` and `prev(x)` are aliases.

use std::collections::BTreeSet;

use thiserror::Error;

use super::{Atom, Formula, Rel, Term, ZERO};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ParseError {
    #[error("{line}:{col}: syntax error: {msg}")]
    Syntax { line: usize, col: usize, msg: String },
    #[error("{line}:{col}: undeclared identifier `{name}`")]
    Undeclared { line: usize, col: usize, name: String },
    #[error("{line}:{col}: sort error: {msg}")]
    Sort { line: usize, col: usize, msg: String },
}

/// A parsed formula file.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Document {
    pub vars: BTreeSet<String>,
    pub props: BTreeSet<String>,
    pub formula: Formula,
}

pub fn parse(text: &str) -> Result<Formula, ParseError> {
    parse_document(text).map(|d| d.formula)
}

pub fn parse_document(text: &str) -> Result<Document, ParseError> {
    let toks = lex(text)?;
    let mut p = Parser { toks, pos: 0, vars: BTreeSet::new(), props: BTreeSet::new() };
    p.headers()?;
    let formula = p.formula()?;
    if !p.at(&Tok::Eof) {
        return Err(p.syntax("trailing input after formula"));
    }
    Ok(Document { vars: p.vars, props: p.props, formula })
}

#[derive(Debug, Clone, PartialEq, Eq)]
enum Tok {
    Ident(String),
    Int(i64),
    LParen,
    RParen,
    Comma,
    Semi,
    Bang,
    Amp,
    Pipe,
    Arrow,
    Plus,
    Minus,
    Rel(Rel),
    Eof,
}

const RESERVED: &[&str] =
    &["var", "prop", "true", "false", "next", "prev", "X", "Y", "Z", "G", "F", "H", "O", "U", "S", "R", "T", ZERO];

fn lex(text: &str) -> Result<Vec<(Tok, usize, usize)>, ParseError> {
    let mut out = Vec::new();
    let chars: Vec<char> = text.chars().collect();
    let (mut i, mut line, mut col) = (0, 1, 1);
    while i < chars.len() {
        let c = chars[i];
        let (tl, tc) = (line, col);
        let mut advance = |n: usize, i: &mut usize| {
            *i += n;
            col += n;
        };
        match c {
            '\n' => {
                i += 1;
                line += 1;
                col = 1;
                continue;
            }
            c if c.is_whitespace() => {
                advance(1, &mut i);
                continue;
            }
            '#' => {
                while i < chars.len() && chars[i] != '\n' {
                    i += 1;
                }
                continue;
            }
            _ => {}
        }
        let two: String = chars[i..(i + 2).min(chars.len())].iter().collect();
        let tok = match (c, two.as_str()) {
            (_, "->") => {
                advance(2, &mut i);
                Tok::Arrow
            }
            (_, "<=") => {
                advance(2, &mut i);
                Tok::Rel(Rel::Le)
            }
            (_, ">=") => {
                advance(2, &mut i);
                Tok::Rel(Rel::Ge)
            }
            _ => {
                let single = match c {
                    '(' => Some(Tok::LParen),
                    ')' => Some(Tok::RParen),
                    ',' => Some(Tok::Comma),
                    ';' => Some(Tok::Semi),
                    '!' => Some(Tok::Bang),
                    '&' => Some(Tok::Amp),
                    '|' => Some(Tok::Pipe),
                    '+' => Some(Tok::Plus),
                    '-' => Some(Tok::Minus),
                    '<' => Some(Tok::Rel(Rel::Lt)),
                    '>' => Some(Tok::Rel(Rel::Gt)),
                    '=' => Some(Tok::Rel(Rel::Eq)),
                    _ => None,
                };
                if let Some(t) = single {
                    advance(1, &mut i);
                    t
                } else if c.is_ascii_digit() {
                    let start = i;
                    while i < chars.len() && chars[i].is_ascii_digit() {
                        advance(1, &mut i);
                    }
                    let s: String = chars[start..i].iter().collect();
                    let v = s.parse().map_err(|_| ParseError::Syntax {
                        line: tl,
                        col: tc,
                        msg: format!("integer literal `{s}` out of range"),
                    })?;
                    Tok::Int(v)
                } else if c.is_ascii_alphabetic() || c == '_' {
                    let start = i;
                    while i < chars.len() && (chars[i].is_ascii_alphanumeric() || chars[i] == '_') {
                        advance(1, &mut i);
                    }
                    Tok::Ident(chars[start..i].iter().collect())
                } else {
                    return Err(ParseError::Syntax { line: tl, col: tc, msg: format!("unexpected character `{c}`") });
                }
            }
        };
        out.push((tok, tl, tc));
    }
    out.push((Tok::Eof, line, col));
    Ok(out)
}

/// One side of a relation before it is normalized into an [`Atom`].
enum Side {
    Term(Term),
    Const(i64),
}

struct Parser {
    toks: Vec<(Tok, usize, usize)>,
    pos: usize,
    vars: BTreeSet<String>,
    props: BTreeSet<String>,
}

impl Parser {
    fn peek(&self) -> &Tok {
        &self.toks[self.pos].0
    }

    fn peek_at(&self, ahead: usize) -> &Tok {
        &self.toks[(self.pos + ahead).min(self.toks.len() - 1)].0
    }

    fn at(&self, t: &Tok) -> bool {
        self.peek() == t
    }

    fn at_ident(&self, name: &str) -> bool {
        matches!(self.peek(), Tok::Ident(s) if s == name)
    }

    fn bump(&mut self) -> Tok {
        let t = self.toks[self.pos].0.clone();
        if self.pos + 1 < self.toks.len() {
            self.pos += 1;
        }
        t
    }

    fn loc(&self) -> (usize, usize) {
        let (_, l, c) = &self.toks[self.pos];
        (*l, *c)
    }

    fn syntax(&self, msg: impl Into<String>) -> ParseError {
        let (line, col) = self.loc();
        ParseError::Syntax { line, col, msg: msg.into() }
    }

    fn sort(&self, msg: impl Into<String>) -> ParseError {
        let (line, col) = self.loc();
        ParseError::Sort { line, col, msg: msg.into() }
    }

    fn expect(&mut self, t: Tok, what: &str) -> Result<(), ParseError> {
        if self.at(&t) {
            self.bump();
            Ok(())
        } else {
            Err(self.syntax(format!("expected {what}, found {}", describe(self.peek()))))
        }
    }

    fn headers(&mut self) -> Result<(), ParseError> {
        loop {
            let is_var = if self.at_ident("var") {
                true
            } else if self.at_ident("prop") {
                false
            } else {
                return Ok(());
            };
            self.bump();
            loop {
                let name = match self.peek().clone() {
                    Tok::Ident(s) if !RESERVED.contains(&s.as_str()) => s,
                    Tok::Ident(s) => return Err(self.syntax(format!("`{s}` is reserved"))),
                    other => return Err(self.syntax(format!("expected identifier, found {}", describe(&other)))),
                };
                if self.vars.contains(&name) || self.props.contains(&name) {
                    return Err(self.sort(format!("`{name}` declared twice")));
                }
                self.bump();
                if is_var {
                    self.vars.insert(name);
                } else {
                    self.props.insert(name);
                }
                if self.at(&Tok::Comma) {
                    self.bump();
                } else {
                    break;
                }
            }
            self.expect(Tok::Semi, "`;`")?;
        }
    }

    fn formula(&mut self) -> Result<Formula, ParseError> {
        let lhs = self.disjunction()?;
        if self.at(&Tok::Arrow) {
            self.bump();
            let rhs = self.formula()?;
            return Ok(Formula::implies(lhs, rhs));
        }
        Ok(lhs)
    }

    fn disjunction(&mut self) -> Result<Formula, ParseError> {
        let mut lhs = self.conjunction()?;
        while self.at(&Tok::Pipe) {
            self.bump();
            lhs = Formula::or(lhs, self.conjunction()?);
        }
        Ok(lhs)
    }

    fn conjunction(&mut self) -> Result<Formula, ParseError> {
        let mut lhs = self.temporal()?;
        while self.at(&Tok::Amp) {
            self.bump();
            lhs = Formula::and(lhs, self.temporal()?);
        }
        Ok(lhs)
    }

    fn temporal(&mut self) -> Result<Formula, ParseError> {
        let lhs = self.unary()?;
        let ctor: fn(Formula, Formula) -> Formula = match self.peek() {
            Tok::Ident(s) if s == "U" => Formula::until,
            Tok::Ident(s) if s == "S" => Formula::since,
            Tok::Ident(s) if s == "R" => Formula::release,
            Tok::Ident(s) if s == "T" => Formula::trigger,
            _ => return Ok(lhs),
        };
        self.bump();
        let rhs = self.temporal()?;
        Ok(ctor(lhs, rhs))
    }

    fn unary(&mut self) -> Result<Formula, ParseError> {
        if let Some(atom) = self.try_atom()? {
            return Ok(Formula::Atom(atom));
        }
        if self.at(&Tok::Bang) {
            self.bump();
            return Ok(Formula::not(self.unary()?));
        }
        let ctor: fn(Formula) -> Formula = match self.peek() {
            Tok::Ident(s) => match s.as_str() {
                "X" => Formula::next,
                "Y" => Formula::yesterday,
                "Z" => Formula::weak_yesterday,
                "G" => Formula::globally,
                "F" => Formula::eventually,
                "H" => Formula::historically,
                "O" => Formula::once,
                _ => return self.primary(),
            },
            _ => return self.primary(),
        };
        self.bump();
        Ok(ctor(self.unary()?))
    }

    fn primary(&mut self) -> Result<Formula, ParseError> {
        match self.peek().clone() {
            Tok::LParen => {
                self.bump();
                let f = self.formula()?;
                self.expect(Tok::RParen, "`)`")?;
                Ok(f)
            }
            Tok::Ident(s) if s == "true" => {
                self.bump();
                Ok(Formula::True)
            }
            Tok::Ident(s) if s == "false" => {
                self.bump();
                Ok(Formula::False)
            }
            Tok::Ident(s) if self.props.contains(&s) => {
                self.bump();
                if matches!(self.peek(), Tok::Rel(_) | Tok::Plus | Tok::Minus) {
                    return Err(self.sort(format!("proposition `{s}` used as a term")));
                }
                Ok(Formula::Prop(s))
            }
            Tok::Ident(s) if self.vars.contains(&s) => Err(self.sort(format!("variable `{s}` used as a formula"))),
            Tok::Ident(s) if !RESERVED.contains(&s.as_str()) => {
                let (line, col) = self.loc();
                Err(ParseError::Undeclared { line, col, name: s })
            }
            other => Err(self.syntax(format!("expected formula, found {}", describe(&other)))),
        }
    }

    /// Parses `side rel side [(+|-) int]` if the input starts with one,
    /// otherwise rewinds and returns `None`.
    fn try_atom(&mut self) -> Result<Option<Atom>, ParseError> {
        let save = self.pos;
        let Some(left) = self.side()? else {
            self.pos = save;
            return Ok(None);
        };
        let rel = match self.peek() {
            Tok::Rel(r) => *r,
            _ => {
                self.pos = save;
                return Ok(None);
            }
        };
        self.bump();
        let right = match self.side()? {
            Some(r) => r,
            None => {
                return Err(match self.peek().clone() {
                    Tok::Ident(s) if self.props.contains(&s) => self.sort(format!("proposition `{s}` used as a term")),
                    other => self.syntax(format!("expected term, found {}", describe(&other))),
                })
            }
        };
        let mut shift = 0i64;
        if matches!(self.peek(), Tok::Plus | Tok::Minus) && matches!(self.peek_at(1), Tok::Int(_)) {
            let sign = if self.bump() == Tok::Minus { -1 } else { 1 };
            if let Tok::Int(v) = self.bump() {
                shift = sign * v;
            }
        }
        Ok(Some(match (left, right) {
            (Side::Term(l), Side::Term(r)) => Atom::new(l, rel, r, shift),
            (Side::Term(l), Side::Const(c)) => Atom::new(l, rel, Term::zero(), c + shift),
            (Side::Const(c), Side::Term(r)) => Atom::new(Term::zero(), rel, r, shift - c),
            (Side::Const(c), Side::Const(d)) => Atom::new(Term::zero(), rel, Term::zero(), d + shift - c),
        }))
    }

    fn side(&mut self) -> Result<Option<Side>, ParseError> {
        match self.peek().clone() {
            Tok::Int(v) => {
                self.bump();
                Ok(Some(Side::Const(v)))
            }
            Tok::Minus if matches!(self.peek_at(1), Tok::Int(_)) => {
                self.bump();
                let Tok::Int(v) = self.bump() else { unreachable!() };
                Ok(Some(Side::Const(-v)))
            }
            Tok::Ident(s) if s == "X" || s == "Y" => {
                let by = if s == "X" { 1 } else { -1 };
                self.bump();
                Ok(match self.side()? {
                    Some(Side::Term(t)) => Some(Side::Term(t.shifted(by))),
                    _ => None,
                })
            }
            Tok::Ident(s) if s == "next" || s == "prev" => {
                let by = if s == "next" { 1 } else { -1 };
                self.bump();
                self.expect(Tok::LParen, "`(`")?;
                let inner = match self.side()? {
                    Some(Side::Term(t)) => t,
                    _ => return Err(self.sort(format!("`{s}` expects a variable term"))),
                };
                self.expect(Tok::RParen, "`)`")?;
                Ok(Some(Side::Term(inner.shifted(by))))
            }
            Tok::Ident(s) if self.vars.contains(&s) => {
                self.bump();
                Ok(Some(Side::Term(Term::var(s))))
            }
            Tok::Ident(s) if !RESERVED.contains(&s.as_str()) && !self.props.contains(&s) => {
                let (line, col) = self.loc();
                Err(ParseError::Undeclared { line, col, name: s })
            }
            _ => Ok(None),
        }
    }
}

fn describe(t: &Tok) -> String {
    match t {
        Tok::Ident(s) => format!("`{s}`"),
        Tok::Int(v) => format!("`{v}`"),
        Tok::Rel(r) => format!("`{}`", r.symbol()),
        Tok::Eof => "end of input".into(),
        other => format!("{other:?}"),
    }
}
