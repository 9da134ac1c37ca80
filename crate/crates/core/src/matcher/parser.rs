//! Recursive-descent parser for the concrete LSE syntax.

use crate::error::{Error, Result};
use crate::lse::{Constraint, Interval, LineAtom, Lse};
use crate::regexgen::Regex;

/// Parses `shape [: cst]`. The `eps` and `empty` keywords denote the empty
/// word and the empty language.
pub fn parse_lse(text: &str) -> Result<Lse> {
    let mut p = Parser {
        src: text.as_bytes(),
        pos: 0,
    };
    let shape = p.union()?;
    let mut constraints = Vec::new();
    if p.eat(b':') {
        loop {
            constraints.push(p.constraint()?);
            if !p.keyword("and") {
                break;
            }
        }
    }
    p.skip_ws();
    if p.pos < p.src.len() {
        return Err(p.error("unexpected trailing input"));
    }
    Ok(Lse { shape, constraints })
}

struct Parser<'a> {
    src: &'a [u8],
    pos: usize,
}

impl Parser<'_> {
    fn location(&self, pos: usize) -> (usize, usize) {
        let before = &self.src[..pos.min(self.src.len())];
        let line = before.iter().filter(|&&c| c == b'\n').count() + 1;
        let column = pos - before.iter().rposition(|&c| c == b'\n').map_or(0, |p| p + 1) + 1;
        (line, column)
    }

    fn error(&self, message: impl Into<String>) -> Error {
        let (line, column) = self.location(self.pos);
        Error::Syntax {
            line,
            column,
            message: message.into(),
        }
    }

    fn skip_ws(&mut self) {
        while self.pos < self.src.len() && self.src[self.pos].is_ascii_whitespace() {
            self.pos += 1;
        }
    }

    fn peek(&mut self) -> Option<u8> {
        self.skip_ws();
        self.src.get(self.pos).copied()
    }

    fn eat(&mut self, c: u8) -> bool {
        if self.peek() == Some(c) {
            self.pos += 1;
            true
        } else {
            false
        }
    }

    fn expect(&mut self, c: u8) -> Result<()> {
        if self.eat(c) {
            Ok(())
        } else {
            Err(self.error(format!("expected `{}`", c as char)))
        }
    }

    fn ident_at(&self, start: usize) -> &str {
        let mut end = start;
        while end < self.src.len()
            && (self.src[end].is_ascii_alphanumeric() || self.src[end] == b'_')
        {
            end += 1;
        }
        if start < self.src.len() && self.src[start].is_ascii_digit() {
            return "";
        }
        std::str::from_utf8(&self.src[start..end]).expect("ascii identifier")
    }

    /// Consumes `word` if the next identifier is exactly `word`.
    fn keyword(&mut self, word: &str) -> bool {
        self.skip_ws();
        if self.ident_at(self.pos) == word {
            self.pos += word.len();
            true
        } else {
            false
        }
    }

    fn ident(&mut self) -> Result<String> {
        self.skip_ws();
        let id = self.ident_at(self.pos).to_owned();
        if id.is_empty() {
            return Err(self.error("expected an identifier"));
        }
        self.pos += id.len();
        Ok(id)
    }

    fn union(&mut self) -> Result<Regex<LineAtom>> {
        let mut r = self.concat()?;
        while self.eat(b'+') {
            let rhs = self.concat()?;
            r = Regex::Union(Box::new(r), Box::new(rhs));
        }
        Ok(r)
    }

    fn concat(&mut self) -> Result<Regex<LineAtom>> {
        let mut r = self.postfix()?;
        while self.eat(b'.') {
            let rhs = self.postfix()?;
            r = Regex::Concat(Box::new(r), Box::new(rhs));
        }
        Ok(r)
    }

    fn postfix(&mut self) -> Result<Regex<LineAtom>> {
        let mut r = self.primary()?;
        while self.eat(b'*') {
            r = Regex::Star(Box::new(r));
        }
        Ok(r)
    }

    fn primary(&mut self) -> Result<Regex<LineAtom>> {
        if self.eat(b'(') {
            let r = self.union()?;
            self.expect(b')')?;
            return Ok(r);
        }
        if self.keyword("line") {
            self.expect(b'(')?;
            let a = self.ident()?;
            self.expect(b',')?;
            let b = self.ident()?;
            self.expect(b',')?;
            let d = self.ident()?;
            self.expect(b')')?;
            return Ok(Regex::Symbol(LineAtom { a, b, d }));
        }
        if self.keyword("eps") {
            return Ok(Regex::Epsilon);
        }
        if self.keyword("empty") {
            return Ok(Regex::Empty);
        }
        Err(self.error("expected `line(...)`, `(`, `eps` or `empty`"))
    }

    fn constraint(&mut self) -> Result<Constraint> {
        let start = {
            self.skip_ws();
            self.pos
        };
        let param = self.ident()?;
        if !self.keyword("in") {
            return Err(self.error("expected `in`"));
        }
        self.expect(b'[')?;
        let lo = self.number()?;
        self.expect(b',')?;
        let hi = self.number()?;
        self.expect(b']')?;
        if lo > hi {
            let (line, column) = self.location(start);
            return Err(Error::EmptyInterval {
                line,
                column,
                param,
                lo,
                hi,
            });
        }
        Ok(Constraint {
            param,
            interval: Interval { lo, hi },
        })
    }

    fn number(&mut self) -> Result<f64> {
        self.skip_ws();
        let start = self.pos;
        let mut end = start;
        if matches!(self.src.get(end), Some(b'+' | b'-')) {
            end += 1;
        }
        if self.src[end..].starts_with(b"inf") {
            end += 3;
        } else {
            while end < self.src.len()
                && (self.src[end].is_ascii_digit()
                    || self.src[end] == b'.'
                    || matches!(self.src[end], b'e' | b'E')
                    || (matches!(self.src[end], b'+' | b'-')
                        && matches!(self.src[end - 1], b'e' | b'E')))
            {
                end += 1;
            }
        }
        let text = std::str::from_utf8(&self.src[start..end]).expect("ascii number");
        match text.parse::<f64>() {
            Ok(x) if !x.is_nan() => {
                self.pos = end;
                Ok(x)
            }
            _ => Err(self.error("expected a number")),
        }
    }
}
