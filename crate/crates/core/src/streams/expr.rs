//! Closed-form stream expressions such as `X/(1-X-X^2)` or `2/(1+X)^3`.

use super::LaurentRational;
use crate::algebra::Rational;
use crate::error::{Error, Result};
use num_bigint::BigInt;

/// Parses a rational-function expression in `X`.
pub fn parse_stream(text: &str) -> Result<LaurentRational> {
    parse_stream_at(text, 1, 1)
}

/// Like [`parse_stream`], reporting errors relative to `(line, col)`.
pub fn parse_stream_at(text: &str, line: usize, col: usize) -> Result<LaurentRational> {
    let mut p = Parser {
        chars: text.chars().collect(),
        pos: 0,
        line,
        col,
    };
    let e = p.expr()?;
    p.skip_ws();
    if p.pos < p.chars.len() {
        return Err(p.err("unexpected input"));
    }
    Ok(e)
}

struct Parser {
    chars: Vec<char>,
    pos: usize,
    line: usize,
    col: usize,
}

impl Parser {
    fn err(&self, msg: &str) -> Error {
        Error::Syntax {
            line: self.line,
            col: self.col + self.pos,
            msg: msg.to_string(),
        }
    }

    fn skip_ws(&mut self) {
        while self.chars.get(self.pos).is_some_and(|c| c.is_whitespace()) {
            self.pos += 1;
        }
    }

    fn peek(&mut self) -> Option<char> {
        self.skip_ws();
        self.chars.get(self.pos).copied()
    }

    fn eat(&mut self, c: char) -> bool {
        if self.peek() == Some(c) {
            self.pos += 1;
            true
        } else {
            false
        }
    }

    fn expr(&mut self) -> Result<LaurentRational> {
        let mut acc = self.product()?;
        loop {
            if self.eat('+') {
                acc = acc.add(&self.product()?);
            } else if self.eat('-') {
                acc = acc.sub(&self.product()?);
            } else {
                return Ok(acc);
            }
        }
    }

    fn product(&mut self) -> Result<LaurentRational> {
        let mut acc = self.unary()?;
        loop {
            if self.eat('*') {
                acc = acc.mul(&self.unary()?);
            } else if self.eat('/') {
                let at = self.pos;
                let d = self.unary()?;
                acc = acc.div(&d).map_err(|_| {
                    let mut e = self.err("division by the zero stream");
                    if let Error::Syntax { col, .. } = &mut e {
                        *col = self.col + at;
                    }
                    e
                })?;
            } else {
                return Ok(acc);
            }
        }
    }

    fn unary(&mut self) -> Result<LaurentRational> {
        if self.eat('-') {
            return Ok(self.unary()?.neg());
        }
        let base = self.atom()?;
        if self.eat('^') {
            let neg = self.eat('-');
            let n = self.integer()?;
            let e: u32 = n
                .try_into()
                .map_err(|_| self.err("exponent too large"))?;
            let p = base.pow(e);
            return if neg {
                LaurentRational::one()
                    .div(&p)
                    .map_err(|_| self.err("division by the zero stream"))
            } else {
                Ok(p)
            };
        }
        Ok(base)
    }

    fn integer(&mut self) -> Result<BigInt> {
        self.skip_ws();
        let start = self.pos;
        while self.chars.get(self.pos).is_some_and(|c| c.is_ascii_digit()) {
            self.pos += 1;
        }
        if start == self.pos {
            return Err(self.err("expected a number"));
        }
        let s: String = self.chars[start..self.pos].iter().collect();
        Ok(s.parse().expect("digits"))
    }

    fn atom(&mut self) -> Result<LaurentRational> {
        match self.peek() {
            Some('X') => {
                self.pos += 1;
                Ok(LaurentRational::x())
            }
            Some('(') => {
                self.pos += 1;
                let e = self.expr()?;
                if !self.eat(')') {
                    return Err(self.err("expected `)`"));
                }
                Ok(e)
            }
            Some(c) if c.is_ascii_digit() => {
                let n = self.integer()?;
                Ok(LaurentRational::constant(Rational::from_integer(n)))
            }
            _ => Err(self.err("expected `X`, a number or `(`")),
        }
    }
}
