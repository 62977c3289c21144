use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use super::Rational;
use crate::error::Error;

/// A closed-form real value: rational literals, square roots of positive
/// rationals, `pi`, `e`, and the four field operations.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum ValueExpr {
    Lit(Rational),
    Sqrt(Rational),
    Pi,
    E,
    Neg(Box<ValueExpr>),
    Add(Box<ValueExpr>, Box<ValueExpr>),
    Sub(Box<ValueExpr>, Box<ValueExpr>),
    Mul(Box<ValueExpr>, Box<ValueExpr>),
    Div(Box<ValueExpr>, Box<ValueExpr>),
}

impl ValueExpr {
    pub fn rational(r: Rational) -> Self {
        Self::Lit(r)
    }

    /// `sqrt(r)`; `r` must be positive.
    pub fn sqrt(r: Rational) -> Result<Self, Error> {
        if r.signum() <= 0 {
            return Err(Error::InvalidExpr {
                input: format!("sqrt({r})"),
                reason: "square root argument must be a positive rational".into(),
            });
        }
        Ok(Self::Sqrt(r))
    }

    /// The exact value when the expression is a rational literal.
    pub fn as_rational(&self) -> Option<&Rational> {
        match self {
            Self::Lit(r) => Some(r),
            _ => None,
        }
    }
}

impl fmt::Display for ValueExpr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::Lit(r) if r.is_negative() => write!(f, "({r})"),
            Self::Lit(r) => write!(f, "{r}"),
            Self::Sqrt(r) => write!(f, "sqrt({r})"),
            Self::Pi => f.write_str("pi"),
            Self::E => f.write_str("e"),
            Self::Neg(a) if matches!(**a, Self::Lit(_)) => write!(f, "-({a})"),
            Self::Neg(a) => write!(f, "-{a}"),
            Self::Add(a, b) => write!(f, "({a} + {b})"),
            Self::Sub(a, b) => write!(f, "({a} - {b})"),
            Self::Mul(a, b) => write!(f, "({a} * {b})"),
            Self::Div(a, b) => write!(f, "({a} / {b})"),
        }
    }
}

impl FromStr for ValueExpr {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self, Error> {
        let mut parser = Parser { src: s, pos: 0 };
        let expr = parser.expr()?;
        parser.skip_ws();
        if parser.pos != s.len() {
            return Err(parser.fail("trailing input"));
        }
        Ok(expr)
    }
}

impl Serialize for ValueExpr {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for ValueExpr {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let s = String::deserialize(deserializer)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

struct Parser<'a> {
    src: &'a str,
    pos: usize,
}

impl Parser<'_> {
    fn fail(&self, reason: &str) -> Error {
        Error::InvalidExpr {
            input: self.src.to_owned(),
            reason: format!("{reason} at offset {}", self.pos),
        }
    }

    fn rest(&self) -> &str {
        &self.src[self.pos..]
    }

    fn skip_ws(&mut self) {
        let rest = self.rest();
        self.pos += rest.len() - rest.trim_start().len();
    }

    fn peek(&mut self) -> Option<char> {
        self.skip_ws();
        self.rest().chars().next()
    }

    fn eat(&mut self, c: char) -> bool {
        if self.peek() == Some(c) {
            self.pos += c.len_utf8();
            true
        } else {
            false
        }
    }

    fn expr(&mut self) -> Result<ValueExpr, Error> {
        let mut lhs = self.term()?;
        loop {
            if self.eat('+') {
                lhs = ValueExpr::Add(Box::new(lhs), Box::new(self.term()?));
            } else if self.eat('-') {
                lhs = ValueExpr::Sub(Box::new(lhs), Box::new(self.term()?));
            } else {
                return Ok(lhs);
            }
        }
    }

    fn term(&mut self) -> Result<ValueExpr, Error> {
        let mut lhs = self.unary()?;
        loop {
            if self.eat('*') {
                lhs = ValueExpr::Mul(Box::new(lhs), Box::new(self.unary()?));
            } else if self.eat('/') {
                lhs = ValueExpr::Div(Box::new(lhs), Box::new(self.unary()?));
            } else {
                return Ok(lhs);
            }
        }
    }

    fn unary(&mut self) -> Result<ValueExpr, Error> {
        if self.eat('-') {
            if self.peek().is_some_and(|c| c.is_ascii_digit()) {
                return Ok(ValueExpr::Lit(-self.rational_literal()?));
            }
            return Ok(ValueExpr::Neg(Box::new(self.unary()?)));
        }
        self.atom()
    }

    fn digits(&mut self) -> usize {
        let len = self.rest().bytes().take_while(u8::is_ascii_digit).count();
        self.pos += len;
        len
    }

    /// `p` or `p/q` with no whitespace around the slash.
    fn rational_literal(&mut self) -> Result<Rational, Error> {
        self.skip_ws();
        let start = self.pos;
        if self.digits() == 0 {
            return Err(self.fail("expected a rational literal"));
        }
        let rest = self.rest();
        if rest.starts_with('/') && rest[1..].starts_with(|c: char| c.is_ascii_digit()) {
            self.pos += 1;
            self.digits();
        }
        self.src[start..self.pos]
            .parse()
            .map_err(|_| self.fail("invalid rational literal"))
    }

    fn atom(&mut self) -> Result<ValueExpr, Error> {
        match self.peek() {
            Some('(') => {
                self.pos += 1;
                let inner = self.expr()?;
                if !self.eat(')') {
                    return Err(self.fail("expected `)`"));
                }
                Ok(inner)
            }
            Some(c) if c.is_ascii_digit() => Ok(ValueExpr::Lit(self.rational_literal()?)),
            Some(c) if c.is_ascii_alphabetic() => {
                let rest = self.rest();
                let len = rest
                    .bytes()
                    .take_while(|b| b.is_ascii_alphanumeric() || *b == b'_')
                    .count();
                let ident = &rest[..len];
                match ident {
                    "pi" => {
                        self.pos += len;
                        Ok(ValueExpr::Pi)
                    }
                    "e" => {
                        self.pos += len;
                        Ok(ValueExpr::E)
                    }
                    "sqrt" => {
                        self.pos += len;
                        if !self.eat('(') {
                            return Err(self.fail("expected `(` after sqrt"));
                        }
                        let r = self.rational_literal()?;
                        if !self.eat(')') {
                            return Err(self.fail("sqrt takes a single rational literal"));
                        }
                        ValueExpr::sqrt(r).map_err(|_| self.fail("sqrt of a non-positive rational"))
                    }
                    _ => Err(self.fail("unknown identifier")),
                }
            }
            Some(_) => Err(self.fail("unexpected character")),
            None => Err(self.fail("unexpected end of input")),
        }
    }
}
