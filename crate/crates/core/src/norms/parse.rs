//! Parser for rational-function expressions such as `X^2 + X`, `1/(X+1)`,
//! `X^-1` or `3/7`.

use num_bigint::BigInt;

use super::field::Field;
use super::ratfunc::RatFunc;
use crate::error::{Error, Result};

pub fn parse_ratfunc<F: Field>(s: &str) -> Result<RatFunc<F>> {
    let mut p = Parser { s: s.as_bytes(), i: 0, src: s };
    let v = p.expr()?;
    p.ws();
    if p.i != p.s.len() {
        return Err(p.err("trailing input"));
    }
    Ok(v)
}

struct Parser<'a> {
    s: &'a [u8],
    i: usize,
    src: &'a str,
}

impl Parser<'_> {
    fn err(&self, what: &str) -> Error {
        Error::Parse(format!("{what} at offset {} in {:?}", self.i, self.src))
    }

    fn ws(&mut self) {
        while self.i < self.s.len() && self.s[self.i].is_ascii_whitespace() {
            self.i += 1;
        }
    }

    fn peek(&mut self) -> Option<u8> {
        self.ws();
        self.s.get(self.i).copied()
    }

    fn expr<F: Field>(&mut self) -> Result<RatFunc<F>> {
        let mut acc = match self.peek() {
            Some(b'-') => {
                self.i += 1;
                self.term::<F>()?.neg()
            }
            Some(b'+') => {
                self.i += 1;
                self.term()?
            }
            _ => self.term()?,
        };
        loop {
            match self.peek() {
                Some(b'+') => {
                    self.i += 1;
                    acc = acc.add(&self.term()?);
                }
                Some(b'-') => {
                    self.i += 1;
                    acc = acc.sub(&self.term()?);
                }
                _ => return Ok(acc),
            }
        }
    }

    fn term<F: Field>(&mut self) -> Result<RatFunc<F>> {
        let mut acc = self.power()?;
        loop {
            match self.peek() {
                Some(b'*') => {
                    self.i += 1;
                    acc = acc.mul(&self.power()?);
                }
                Some(b'/') => {
                    self.i += 1;
                    let d = self.power()?;
                    acc = acc.div(&d).ok_or_else(|| self.err("division by zero"))?;
                }
                Some(b'X' | b'x' | b'(') => acc = acc.mul(&self.power()?),
                _ => return Ok(acc),
            }
        }
    }

    fn power<F: Field>(&mut self) -> Result<RatFunc<F>> {
        let base = self.atom()?;
        if self.peek() != Some(b'^') {
            return Ok(base);
        }
        self.i += 1;
        let neg = if self.peek() == Some(b'-') {
            self.i += 1;
            true
        } else {
            false
        };
        let e = self.int()?;
        let e: i64 = e.try_into().map_err(|_| self.err("exponent too large"))?;
        base.pow(if neg { -e } else { e }).ok_or_else(|| self.err("negative power of zero"))
    }

    fn atom<F: Field>(&mut self) -> Result<RatFunc<F>> {
        match self.peek() {
            Some(b'X' | b'x') => {
                self.i += 1;
                Ok(RatFunc::x_pow(1))
            }
            Some(b'(') => {
                self.i += 1;
                let v = self.expr()?;
                if self.peek() != Some(b')') {
                    return Err(self.err("expected ')'"));
                }
                self.i += 1;
                Ok(v)
            }
            Some(c) if c.is_ascii_digit() => Ok(RatFunc::constant(F::from_int(&self.int()?))),
            _ => Err(self.err("expected X, a number or '('")),
        }
    }

    fn int(&mut self) -> Result<BigInt> {
        self.ws();
        let start = self.i;
        while self.i < self.s.len() && self.s[self.i].is_ascii_digit() {
            self.i += 1;
        }
        if start == self.i {
            return Err(self.err("expected digits"));
        }
        self.src[start..self.i].parse().map_err(|_| self.err("bad integer"))
    }
}
