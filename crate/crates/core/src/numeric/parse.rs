//! Text syntax: integers, `+ - * /`, parentheses, `sqrt(..)` of a
//! non-negative rational, and `inf`.

use num_bigint::BigInt;

use super::ExactReal;
use crate::error::{Error, Result};

struct Parser<'a> {
    src: &'a str,
    pos: usize,
}

pub(super) fn parse(src: &str) -> Result<ExactReal> {
    let mut p = Parser { src, pos: 0 };
    let v = p.expr()?;
    p.skip_ws();
    if p.pos != src.len() {
        return Err(p.error("unexpected trailing input"));
    }
    Ok(v)
}

impl Parser<'_> {
    fn error(&self, msg: &str) -> Error {
        Error::Parse {
            pos: self.pos,
            msg: msg.to_string(),
        }
    }

    fn skip_ws(&mut self) {
        let rest = &self.src[self.pos..];
        self.pos += rest.len() - rest.trim_start().len();
    }

    fn peek(&mut self) -> Option<char> {
        self.skip_ws();
        self.src[self.pos..].chars().next()
    }

    fn eat(&mut self, token: &str) -> bool {
        self.skip_ws();
        if self.src[self.pos..].starts_with(token) {
            self.pos += token.len();
            true
        } else {
            false
        }
    }

    fn lift(&self, r: Result<ExactReal>, at: usize) -> Result<ExactReal> {
        r.map_err(|e| Error::Parse {
            pos: at,
            msg: e.to_string(),
        })
    }

    fn expr(&mut self) -> Result<ExactReal> {
        let mut acc = self.term()?;
        loop {
            let at = self.pos;
            if self.eat("+") {
                let rhs = self.term()?;
                acc = self.lift(acc.try_add(&rhs), at)?;
            } else if self.eat("-") {
                let rhs = self.term()?;
                acc = self.lift(acc.try_sub(&rhs), at)?;
            } else {
                return Ok(acc);
            }
        }
    }

    fn term(&mut self) -> Result<ExactReal> {
        let mut acc = self.unary()?;
        loop {
            let at = self.pos;
            if self.eat("*") {
                let rhs = self.unary()?;
                acc = self.lift(acc.try_mul(&rhs), at)?;
            } else if self.eat("/") {
                let rhs = self.unary()?;
                acc = self.lift(acc.try_div(&rhs), at)?;
            } else {
                return Ok(acc);
            }
        }
    }

    fn unary(&mut self) -> Result<ExactReal> {
        if self.eat("-") {
            return Ok(-self.unary()?);
        }
        if self.eat("+") {
            return self.unary();
        }
        self.atom()
    }

    fn atom(&mut self) -> Result<ExactReal> {
        let start = self.pos;
        if self.eat("(") {
            let v = self.expr()?;
            if !self.eat(")") {
                return Err(self.error("expected ')'"));
            }
            return Ok(v);
        }
        if self.eat("sqrt") {
            if !self.eat("(") {
                return Err(self.error("expected '(' after sqrt"));
            }
            let arg = self.expr()?;
            if !self.eat(")") {
                return Err(self.error("expected ')'"));
            }
            let Some(q) = arg.as_rational() else {
                return Err(Error::Parse {
                    pos: start,
                    msg: "sqrt argument must be rational".into(),
                });
            };
            return self.lift(ExactReal::sqrt_of(q), start);
        }
        if self.eat("inf") || self.eat("∞") {
            return Ok(ExactReal::Infinity);
        }
        match self.peek() {
            Some(c) if c.is_ascii_digit() => {
                let digits = self.src[self.pos..]
                    .bytes()
                    .take_while(u8::is_ascii_digit)
                    .count();
                let n: BigInt = self.src[self.pos..self.pos + digits]
                    .parse()
                    .map_err(|_| self.error("bad integer"))?;
                self.pos += digits;
                Ok(ExactReal::integer(n))
            }
            Some(_) => Err(self.error("unexpected character")),
            None => Err(self.error("unexpected end of input")),
        }
    }
}
