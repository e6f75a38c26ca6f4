//! Parser for real expressions built from rationals, `sqrt(n)`, `+ - * /` and parentheses,
//! evaluated exactly in a single quadratic field.

use num_traits::Signed;

use super::rational::{self, Rat};
use super::surd::QuadSurd;
use crate::error::{Error, Result};

pub fn parse_surd(src: &str) -> Result<QuadSurd> {
    let mut p = Parser { s: src.as_bytes(), i: 0 };
    let v = p.sum()?;
    p.ws();
    if p.i != p.s.len() {
        return Err(p.err("trailing input"));
    }
    Ok(v)
}

struct Parser<'a> {
    s: &'a [u8],
    i: usize,
}

impl Parser<'_> {
    fn err(&self, what: &str) -> Error {
        Error::Input(format!("{what} at offset {} in {:?}", self.i, String::from_utf8_lossy(self.s)))
    }

    fn ws(&mut self) {
        while self.i < self.s.len() && self.s[self.i].is_ascii_whitespace() {
            self.i += 1;
        }
    }

    fn eat(&mut self, c: u8) -> bool {
        self.ws();
        if self.s.get(self.i) == Some(&c) {
            self.i += 1;
            true
        } else {
            false
        }
    }

    fn same_field(a: &QuadSurd, b: &QuadSurd) -> bool {
        a.is_rational() || b.is_rational() || a.d == b.d
    }

    fn sum(&mut self) -> Result<QuadSurd> {
        let mut v = self.product()?;
        loop {
            let op = if self.eat(b'+') {
                1
            } else if self.eat(b'-') {
                -1
            } else {
                return Ok(v);
            };
            let r = self.product()?;
            if !Self::same_field(&v, &r) {
                return Err(self.err("square roots from different fields"));
            }
            v = if op > 0 { v.add(&r) } else { v.sub(&r) };
        }
    }

    fn product(&mut self) -> Result<QuadSurd> {
        let mut v = self.unary()?;
        loop {
            let mul = if self.eat(b'*') {
                true
            } else if self.eat(b'/') {
                false
            } else {
                return Ok(v);
            };
            let r = self.unary()?;
            if !Self::same_field(&v, &r) {
                return Err(self.err("square roots from different fields"));
            }
            if mul {
                v = v.mul(&r);
            } else {
                if r == QuadSurd::rational(Rat::from_integer(0.into())) {
                    return Err(self.err("division by zero"));
                }
                v = v.div(&r);
            }
        }
    }

    fn unary(&mut self) -> Result<QuadSurd> {
        if self.eat(b'-') {
            return Ok(self.unary()?.neg());
        }
        if self.eat(b'+') {
            return self.unary();
        }
        self.atom()
    }

    fn atom(&mut self) -> Result<QuadSurd> {
        self.ws();
        if self.eat(b'(') {
            let v = self.sum()?;
            if !self.eat(b')') {
                return Err(self.err("expected ')'"));
            }
            return Ok(v);
        }
        if self.s[self.i..].starts_with(b"sqrt") {
            self.i += 4;
            if !self.eat(b'(') {
                return Err(self.err("expected '(' after sqrt"));
            }
            let inner = self.sum()?;
            if !self.eat(b')') {
                return Err(self.err("expected ')'"));
            }
            if !inner.is_rational() || inner.a.is_negative() || !inner.a.is_integer() {
                return Err(self.err("sqrt takes a non-negative integer"));
            }
            return Ok(QuadSurd::new(Rat::from_integer(0.into()), Rat::from_integer(1.into()), inner.a.to_integer()));
        }
        let start = self.i;
        while self.i < self.s.len() {
            let c = self.s[self.i];
            let exp_sign = (c == b'-' || c == b'+')
                && self.i > start
                && matches!(self.s[self.i - 1], b'e' | b'E');
            if c.is_ascii_digit() || c == b'.' || c == b'e' || c == b'E' || exp_sign {
                self.i += 1;
            } else {
                break;
            }
        }
        if start == self.i {
            return Err(self.err("expected a number"));
        }
        let text = std::str::from_utf8(&self.s[start..self.i]).expect("ascii");
        Ok(QuadSurd::rational(rational::parse(text)?))
    }
}
