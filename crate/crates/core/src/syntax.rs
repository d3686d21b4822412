//! Concrete syntax for predicates, STL formulas and SREs.
//!
//! ```text
//! predicate  x <= 3 && !(y < 2) || z < 0        (> and >= desugar to negations)
//! stl        F[0,5] (x <= 5 && G[0,1] y > 6)     phi U[1,3] psi, X, Y, P, H, ->
//! sre        T ; ((x <= 5 ; T) & <x <= 3>[1,1]) ; T      | & ; * eps <e>[a,b]
//! ```

use crate::predicate::{Atom, Cmp, Predicate};
use crate::spec::{Spec, Sre, Stl, TimeInterval};

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
#[error("parse error at offset {pos}: {msg}")]
pub struct ParseError {
    pub pos: usize,
    pub msg: String,
}

#[derive(Debug, Clone, PartialEq)]
enum Tok {
    Ident(String),
    Num(f64),
    Lt,
    Le,
    Gt,
    Ge,
    Bang,
    AndAnd,
    OrOr,
    Amp,
    Bar,
    Semi,
    Star,
    Arrow,
    LParen,
    RParen,
    LBrack,
    RBrack,
    Comma,
    Eof,
}

fn lex(src: &str) -> Result<Vec<(Tok, usize)>, ParseError> {
    let chars: Vec<(usize, char)> = src.char_indices().collect();
    let mut out = Vec::new();
    let mut i = 0;
    let peek = |i: usize| chars.get(i).map(|c| c.1);
    while i < chars.len() {
        let (pos, c) = chars[i];
        if c.is_whitespace() {
            i += 1;
            continue;
        }
        let two = |t: Tok, n: &mut usize| {
            *n += 2;
            t
        };
        let tok = match c {
            '<' if peek(i + 1) == Some('=') => two(Tok::Le, &mut i),
            '>' if peek(i + 1) == Some('=') => two(Tok::Ge, &mut i),
            '&' if peek(i + 1) == Some('&') => two(Tok::AndAnd, &mut i),
            '|' if peek(i + 1) == Some('|') => two(Tok::OrOr, &mut i),
            '-' if peek(i + 1) == Some('>') => two(Tok::Arrow, &mut i),
            '-' | '+' | '0'..='9' | '.' => {
                let start = i;
                i += 1;
                while let Some(d) = peek(i) {
                    let exp_sign = (d == '-' || d == '+') && matches!(peek(i - 1), Some('e' | 'E'));
                    if d.is_ascii_digit() || d == '.' || d == 'e' || d == 'E' || exp_sign {
                        i += 1;
                    } else {
                        break;
                    }
                }
                let end = chars.get(i).map(|c| c.0).unwrap_or(src.len());
                let text = &src[chars[start].0..end];
                let v: f64 = text.parse().map_err(|_| ParseError {
                    pos,
                    msg: format!("invalid number `{text}`"),
                })?;
                out.push((Tok::Num(v), pos));
                continue;
            }
            c if c.is_alphabetic() || c == '_' => {
                let start = i;
                while let Some(d) = peek(i) {
                    if d.is_alphanumeric() || d == '_' || d == '\'' {
                        i += 1;
                    } else {
                        break;
                    }
                }
                let end = chars.get(i).map(|c| c.0).unwrap_or(src.len());
                out.push((Tok::Ident(src[chars[start].0..end].to_string()), pos));
                continue;
            }
            _ => {
                i += 1;
                match c {
                    '<' => Tok::Lt,
                    '>' => Tok::Gt,
                    '\u{2264}' => Tok::Le,
                    '\u{2265}' => Tok::Ge,
                    '!' | '\u{ac}' => Tok::Bang,
                    '\u{2227}' => Tok::AndAnd,
                    '\u{2228}' => Tok::OrOr,
                    '\u{2192}' => Tok::Arrow,
                    '&' | '\u{2229}' => Tok::Amp,
                    '|' | '\u{222a}' => Tok::Bar,
                    ';' | '\u{b7}' => Tok::Semi,
                    '*' => Tok::Star,
                    '(' => Tok::LParen,
                    ')' => Tok::RParen,
                    '[' => Tok::LBrack,
                    ']' => Tok::RBrack,
                    ',' => Tok::Comma,
                    '\u{22a4}' => Tok::Ident("true".into()),
                    '\u{22a5}' => Tok::Ident("false".into()),
                    '\u{3b5}' => Tok::Ident("eps".into()),
                    _ => {
                        return Err(ParseError { pos, msg: format!("unexpected character `{c}`") })
                    }
                }
            }
        };
        out.push((tok, pos));
    }
    out.push((Tok::Eof, src.len()));
    Ok(out)
}

const STL_KEYWORDS: &[&str] = &["F", "G", "X", "Y", "P", "H", "U", "S", "T", "true", "false"];
const PRED_KEYWORDS: &[&str] = &["T", "true", "false", "eps"];

struct Parser {
    toks: Vec<(Tok, usize)>,
    at: usize,
    keywords: &'static [&'static str],
}

type PResult<T> = Result<T, ParseError>;

impl Parser {
    fn new(src: &str, keywords: &'static [&'static str]) -> PResult<Self> {
        Ok(Parser { toks: lex(src)?, at: 0, keywords })
    }

    fn peek(&self) -> &Tok {
        &self.toks[self.at].0
    }

    fn pos(&self) -> usize {
        self.toks[self.at].1
    }

    fn bump(&mut self) -> Tok {
        let t = self.toks[self.at].0.clone();
        if self.at + 1 < self.toks.len() {
            self.at += 1;
        }
        t
    }

    fn eat(&mut self, t: &Tok) -> bool {
        if self.peek() == t {
            self.bump();
            true
        } else {
            false
        }
    }

    fn is_kw(&self, kw: &str) -> bool {
        matches!(self.peek(), Tok::Ident(s) if s == kw)
    }

    fn err<T>(&self, msg: impl Into<String>) -> PResult<T> {
        Err(ParseError { pos: self.pos(), msg: msg.into() })
    }

    fn expect(&mut self, t: Tok, what: &str) -> PResult<()> {
        if self.eat(&t) {
            Ok(())
        } else {
            self.err(format!("expected {what}, found {}", describe(self.peek())))
        }
    }

    fn finish(&mut self) -> PResult<()> {
        if *self.peek() == Tok::Eof {
            Ok(())
        } else {
            self.err(format!("unexpected {}", describe(self.peek())))
        }
    }

    fn number(&mut self) -> PResult<f64> {
        match self.peek().clone() {
            Tok::Num(v) if v.is_finite() => {
                self.bump();
                Ok(v)
            }
            t => self.err(format!("expected number, found {}", describe(&t))),
        }
    }

    /// `x ~ k` with `~` one of `< <= > >=`; returns the predicate form.
    fn atom(&mut self) -> PResult<Predicate> {
        let var = match self.peek().clone() {
            Tok::Ident(s) if !self.keywords.contains(&s.as_str()) => {
                self.bump();
                s
            }
            t => return self.err(format!("expected variable, found {}", describe(&t))),
        };
        let op = self.peek().clone();
        if !matches!(op, Tok::Lt | Tok::Le | Tok::Gt | Tok::Ge) {
            return self.err(format!("expected comparison, found {}", describe(&op)));
        }
        self.bump();
        let k = self.number()?;
        let (cmp, neg) = match op {
            Tok::Lt => (Cmp::Lt, false),
            Tok::Le => (Cmp::Le, false),
            Tok::Gt => (Cmp::Le, true),
            _ => (Cmp::Lt, true),
        };
        let a = Predicate::Atom(Atom::new(var, cmp, k));
        Ok(if neg { Predicate::not(a) } else { a })
    }

    fn constant(&mut self) -> Option<bool> {
        match self.peek() {
            Tok::Ident(s) if s == "true" || s == "T" => {
                self.bump();
                Some(true)
            }
            Tok::Ident(s) if s == "false" => {
                self.bump();
                Some(false)
            }
            _ => None,
        }
    }

    fn pred_or(&mut self) -> PResult<Predicate> {
        let mut l = self.pred_and()?;
        while self.eat(&Tok::OrOr) {
            l = Predicate::or(l, self.pred_and()?);
        }
        Ok(l)
    }

    fn pred_and(&mut self) -> PResult<Predicate> {
        let mut l = self.pred_unary()?;
        while self.eat(&Tok::AndAnd) {
            l = Predicate::and(l, self.pred_unary()?);
        }
        Ok(l)
    }

    fn pred_unary(&mut self) -> PResult<Predicate> {
        if self.eat(&Tok::Bang) {
            return Ok(Predicate::not(self.pred_unary()?));
        }
        if let Some(b) = self.constant() {
            return Ok(if b { Predicate::True } else { Predicate::False });
        }
        if self.eat(&Tok::LParen) {
            let p = self.pred_or()?;
            self.expect(Tok::RParen, "`)`")?;
            return Ok(p);
        }
        self.atom()
    }

    fn interval(&mut self) -> PResult<TimeInterval> {
        self.expect(Tok::LBrack, "`[`")?;
        let lo = self.time_bound()?;
        self.expect(Tok::Comma, "`,`")?;
        let hi = if self.is_kw("inf") {
            self.bump();
            None
        } else {
            Some(self.time_bound()?)
        };
        if !(self.eat(&Tok::RBrack) || self.eat(&Tok::RParen)) {
            return self.err("expected `]`");
        }
        if let Some(h) = hi {
            if h < lo {
                return self.err(format!("empty interval [{lo},{h}]"));
            }
        }
        Ok(TimeInterval { lo, hi })
    }

    fn time_bound(&mut self) -> PResult<u64> {
        let v = self.number()?;
        if v < 0.0 || v.fract() != 0.0 {
            return self.err(format!("time bound must be a non-negative integer, got {v}"));
        }
        Ok(v as u64)
    }

    fn opt_interval(&mut self) -> PResult<TimeInterval> {
        if *self.peek() == Tok::LBrack {
            self.interval()
        } else {
            Ok(TimeInterval::UNBOUNDED)
        }
    }

    fn stl_implies(&mut self) -> PResult<Stl> {
        let l = self.stl_or()?;
        if self.eat(&Tok::Arrow) {
            return Ok(Stl::Implies(Box::new(l), Box::new(self.stl_implies()?)));
        }
        Ok(l)
    }

    fn stl_or(&mut self) -> PResult<Stl> {
        let mut l = self.stl_and()?;
        while self.eat(&Tok::OrOr) {
            l = Stl::Or(Box::new(l), Box::new(self.stl_and()?));
        }
        Ok(l)
    }

    fn stl_and(&mut self) -> PResult<Stl> {
        let mut l = self.stl_binary()?;
        while self.eat(&Tok::AndAnd) {
            l = Stl::And(Box::new(l), Box::new(self.stl_binary()?));
        }
        Ok(l)
    }

    fn stl_binary(&mut self) -> PResult<Stl> {
        let mut l = self.stl_unary()?;
        loop {
            if self.is_kw("U") {
                self.bump();
                let i = self.opt_interval()?;
                l = Stl::Until(i, Box::new(l), Box::new(self.stl_unary()?));
            } else if self.is_kw("S") {
                self.bump();
                let i = self.opt_interval()?;
                l = Stl::Since(i, Box::new(l), Box::new(self.stl_unary()?));
            } else {
                return Ok(l);
            }
        }
    }

    fn stl_unary(&mut self) -> PResult<Stl> {
        if self.eat(&Tok::Bang) {
            return Ok(Stl::Not(Box::new(self.stl_unary()?)));
        }
        if let Tok::Ident(s) = self.peek().clone() {
            let op = s.as_str();
            if matches!(op, "F" | "G" | "P" | "H") {
                self.bump();
                let i = self.opt_interval()?;
                let f = Box::new(self.stl_unary()?);
                return Ok(match op {
                    "F" => Stl::Eventually(i, f),
                    "G" => Stl::Always(i, f),
                    "P" => Stl::Once(i, f),
                    _ => Stl::Historically(i, f),
                });
            }
            if op == "X" || op == "Y" {
                self.bump();
                let f = Box::new(self.stl_unary()?);
                return Ok(if op == "X" { Stl::Next(f) } else { Stl::Prev(f) });
            }
        }
        if let Some(b) = self.constant() {
            return Ok(if b { Stl::True } else { Stl::False });
        }
        if self.eat(&Tok::LParen) {
            let f = self.stl_implies()?;
            self.expect(Tok::RParen, "`)`")?;
            return Ok(f);
        }
        Ok(Stl::from_predicate(&self.atom()?))
    }

    fn sre_union(&mut self) -> PResult<Sre> {
        let mut l = self.sre_inter()?;
        while self.eat(&Tok::Bar) {
            l = Sre::Union(Box::new(l), Box::new(self.sre_inter()?));
        }
        Ok(l)
    }

    fn sre_inter(&mut self) -> PResult<Sre> {
        let mut l = self.sre_concat()?;
        while self.eat(&Tok::Amp) {
            l = Sre::Inter(Box::new(l), Box::new(self.sre_concat()?));
        }
        Ok(l)
    }

    fn sre_concat(&mut self) -> PResult<Sre> {
        let mut l = self.sre_postfix()?;
        while self.eat(&Tok::Semi) {
            l = Sre::Concat(Box::new(l), Box::new(self.sre_postfix()?));
        }
        Ok(l)
    }

    fn sre_postfix(&mut self) -> PResult<Sre> {
        let mut e = self.sre_primary()?;
        while self.eat(&Tok::Star) {
            e = Sre::Star(Box::new(e));
        }
        Ok(e)
    }

    fn sre_primary(&mut self) -> PResult<Sre> {
        if self.is_kw("eps") {
            self.bump();
            return Ok(Sre::Epsilon);
        }
        if self.eat(&Tok::Lt) {
            let e = self.sre_union()?;
            self.expect(Tok::Gt, "`>`")?;
            let i = self.interval()?;
            return Ok(Sre::Duration(i, Box::new(e)));
        }
        // a parenthesised group may be a predicate or an expression
        let save = self.at;
        match self.pred_or() {
            Ok(p) => Ok(Sre::Pred(p)),
            Err(e) if self.toks[save].0 == Tok::LParen => {
                self.at = save;
                self.bump();
                let inner = self.sre_union().map_err(|e2| if e2.pos >= e.pos { e2 } else { e })?;
                self.expect(Tok::RParen, "`)`")?;
                Ok(inner)
            }
            Err(e) => Err(e),
        }
    }
}

fn describe(t: &Tok) -> String {
    match t {
        Tok::Ident(s) => format!("`{s}`"),
        Tok::Num(v) => format!("`{v}`"),
        Tok::Eof => "end of input".into(),
        other => format!("{other:?}"),
    }
}

pub fn parse_predicate(src: &str) -> Result<Predicate, ParseError> {
    let mut p = Parser::new(src, PRED_KEYWORDS)?;
    let r = p.pred_or()?;
    p.finish()?;
    Ok(r)
}

pub fn parse_stl(src: &str) -> Result<Stl, ParseError> {
    let mut p = Parser::new(src, STL_KEYWORDS)?;
    let r = p.stl_implies()?;
    p.finish()?;
    Ok(r)
}

pub fn parse_sre(src: &str) -> Result<Sre, ParseError> {
    let mut p = Parser::new(src, PRED_KEYWORDS)?;
    let r = p.sre_union()?;
    p.finish()?;
    Ok(r)
}

/// Spec file: optional `#lang stl` / `#lang sre` first line (default stl);
/// other lines starting with `#` are comments.
pub fn parse_spec(src: &str) -> Result<Spec, ParseError> {
    let mut lang = "stl";
    let mut body = String::new();
    for (n, line) in src.lines().enumerate() {
        let t = line.trim();
        if let Some(rest) = t.strip_prefix("#lang") {
            if n == 0 {
                lang = match rest.trim() {
                    "stl" => "stl",
                    "sre" => "sre",
                    other => {
                        return Err(ParseError { pos: 0, msg: format!("unknown language `{other}`") })
                    }
                };
            }
            body.push_str(&" ".repeat(line.len()));
        } else if t.starts_with('#') {
            body.push_str(&" ".repeat(line.len()));
        } else {
            body.push_str(line);
        }
        body.push('\n');
    }
    if lang == "sre" {
        parse_sre(&body).map(Spec::Sre)
    } else {
        parse_stl(&body).map(Spec::Stl)
    }
}
