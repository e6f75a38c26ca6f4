//! Polynomials in two variables with exact rational coefficients.

use std::collections::BTreeMap;
use std::fmt;

use num_traits::{One, Signed, Zero};

use super::rational::{self, int};
use super::{Rat, RatInterval};
use crate::error::{Error, Result};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Poly2 {
    /// `(i, j) -> c` for the monomial `c x^i y^j`; no zero coefficients.
    terms: BTreeMap<(u32, u32), Rat>,
}

impl Poly2 {
    pub fn zero() -> Self {
        Self { terms: BTreeMap::new() }
    }

    pub fn is_zero(&self) -> bool {
        self.terms.values().all(|c| c.is_zero())
    }

    pub fn constant(c: Rat) -> Self {
        Self::monomial(c, 0, 0)
    }

    pub fn monomial(c: Rat, i: u32, j: u32) -> Self {
        let mut terms = BTreeMap::new();
        if !c.is_zero() {
            terms.insert((i, j), c);
        }
        Self { terms }
    }

    pub fn x() -> Self {
        Self::monomial(Rat::one(), 1, 0)
    }

    pub fn y() -> Self {
        Self::monomial(Rat::one(), 0, 1)
    }

    /// `a x + b y + c`.
    pub fn linear(a: Rat, b: Rat, c: Rat) -> Self {
        Self::monomial(a, 1, 0).add(&Self::monomial(b, 0, 1)).add(&Self::constant(c))
    }

    pub fn terms(&self) -> impl Iterator<Item = (u32, u32, &Rat)> {
        self.terms.iter().map(|(&(i, j), c)| (i, j, c))
    }

    pub fn coeff(&self, i: u32, j: u32) -> Rat {
        self.terms.get(&(i, j)).cloned().unwrap_or_else(Rat::zero)
    }

    pub fn degree(&self) -> u32 {
        self.terms.keys().map(|(i, j)| i + j).max().unwrap_or(0)
    }

    /// `(a, b, c)` when the polynomial is `a x + b y + c`.
    pub fn as_linear(&self) -> Option<(Rat, Rat, Rat)> {
        (self.degree() <= 1).then(|| (self.coeff(1, 0), self.coeff(0, 1), self.coeff(0, 0)))
    }

    pub fn add(&self, o: &Poly2) -> Poly2 {
        let mut terms = self.terms.clone();
        for (k, c) in &o.terms {
            let v = terms.remove(k).unwrap_or_else(Rat::zero) + c;
            if !v.is_zero() {
                terms.insert(*k, v);
            }
        }
        Poly2 { terms }
    }

    pub fn neg(&self) -> Poly2 {
        Poly2 { terms: self.terms.iter().map(|(k, c)| (*k, -c)).collect() }
    }

    pub fn mul(&self, o: &Poly2) -> Poly2 {
        let mut out = Poly2::zero();
        for (&(i, j), c) in &self.terms {
            for (&(k, l), d) in &o.terms {
                out = out.add(&Poly2::monomial(c * d, i + k, j + l));
            }
        }
        out
    }

    pub fn pow(&self, e: u32) -> Poly2 {
        (0..e).fold(Poly2::constant(Rat::one()), |acc, _| acc.mul(self))
    }

    pub fn dx(&self) -> Poly2 {
        let mut out = Poly2::zero();
        for (&(i, j), c) in &self.terms {
            if i > 0 {
                out = out.add(&Poly2::monomial(c * int(i as i64), i - 1, j));
            }
        }
        out
    }

    pub fn dy(&self) -> Poly2 {
        let mut out = Poly2::zero();
        for (&(i, j), c) in &self.terms {
            if j > 0 {
                out = out.add(&Poly2::monomial(c * int(j as i64), i, j - 1));
            }
        }
        out
    }

    /// `f(px x + qx, py y + qy)`.
    pub fn substitute_affine(&self, px: &Rat, qx: &Rat, py: &Rat, qy: &Rat) -> Poly2 {
        let lx = Poly2::linear(px.clone(), Rat::zero(), qx.clone());
        let ly = Poly2::linear(Rat::zero(), py.clone(), qy.clone());
        self.terms.iter().fold(Poly2::zero(), |acc, (&(i, j), c)| {
            acc.add(&lx.pow(i).mul(&ly.pow(j)).mul(&Poly2::constant(c.clone())))
        })
    }

    pub fn eval(&self, x: &Rat, y: &Rat) -> Rat {
        self.terms.iter().fold(Rat::zero(), |acc, (&(i, j), c)| acc + c * pow(x, i) * pow(y, j))
    }

    /// Naive interval extension: contains the range on the box.
    pub fn eval_box(&self, x: &RatInterval, y: &RatInterval) -> RatInterval {
        self.terms.iter().fold(RatInterval::point(Rat::zero()), |acc, (&(i, j), c)| {
            acc.add(&x.powi(i).mul(&y.powi(j)).scale(c))
        })
    }

    /// Range on the box: exact when the polynomial is monotone in each variable
    /// there (then the extremes sit at corners), otherwise the naive enclosure.
    pub fn range(&self, x: &RatInterval, y: &RatInterval) -> RatInterval {
        let mono = |d: Poly2| {
            let r = d.eval_box(x, y);
            !r.lo.is_negative() || !r.hi.is_positive()
        };
        if mono(self.dx()) && mono(self.dy()) {
            let corners = [(&x.lo, &y.lo), (&x.lo, &y.hi), (&x.hi, &y.lo), (&x.hi, &y.hi)].map(|(a, b)| self.eval(a, b));
            let lo = corners.iter().min().unwrap().clone();
            let hi = corners.iter().max().unwrap().clone();
            RatInterval::new(lo, hi)
        } else {
            self.eval_box(x, y)
        }
    }

    /// Parses expressions in `x`, `y`, rationals and decimals with `+ - * ^ ( )`.
    pub fn parse(src: &str) -> Result<Poly2> {
        let toks: Vec<char> = src.chars().filter(|c| !c.is_whitespace()).collect();
        let mut p = Parser { toks, pos: 0 };
        let v = p.sum()?;
        if p.pos != p.toks.len() {
            return Err(p.err("trailing input"));
        }
        Ok(v)
    }
}

fn pow(x: &Rat, e: u32) -> Rat {
    (0..e).fold(Rat::one(), |acc, _| acc * x)
}

struct Parser {
    toks: Vec<char>,
    pos: usize,
}

impl Parser {
    fn err(&self, m: &str) -> Error {
        Error::Input(format!("polynomial: {m} at {}", self.pos))
    }

    fn peek(&self) -> Option<char> {
        self.toks.get(self.pos).copied()
    }

    fn sum(&mut self) -> Result<Poly2> {
        let mut acc = match self.peek() {
            Some('-') => {
                self.pos += 1;
                self.product()?.neg()
            }
            Some('+') => {
                self.pos += 1;
                self.product()?
            }
            _ => self.product()?,
        };
        while let Some(c @ ('+' | '-')) = self.peek() {
            self.pos += 1;
            let t = self.product()?;
            acc = if c == '+' { acc.add(&t) } else { acc.add(&t.neg()) };
        }
        Ok(acc)
    }

    fn product(&mut self) -> Result<Poly2> {
        let mut acc = self.power()?;
        loop {
            match self.peek() {
                Some('*') => {
                    self.pos += 1;
                    acc = acc.mul(&self.power()?);
                }
                Some('/') => {
                    self.pos += 1;
                    let d = self.power()?;
                    if d.degree() > 0 || d.coeff(0, 0).is_zero() {
                        return Err(self.err("division by a non-constant or zero"));
                    }
                    acc = acc.mul(&Poly2::constant(Rat::one() / d.coeff(0, 0)));
                }
                Some('x' | 'y' | '(' | '0'..='9' | '.') => acc = acc.mul(&self.power()?),
                _ => return Ok(acc),
            }
        }
    }

    fn power(&mut self) -> Result<Poly2> {
        let base = self.atom()?;
        if self.peek() == Some('^') {
            self.pos += 1;
            let start = self.pos;
            while self.peek().is_some_and(|c| c.is_ascii_digit()) {
                self.pos += 1;
            }
            let e: u32 = self.toks[start..self.pos].iter().collect::<String>().parse().map_err(|_| self.err("exponent"))?;
            return Ok(base.pow(e));
        }
        Ok(base)
    }

    fn atom(&mut self) -> Result<Poly2> {
        match self.peek() {
            Some('x') => {
                self.pos += 1;
                Ok(Poly2::x())
            }
            Some('y') => {
                self.pos += 1;
                Ok(Poly2::y())
            }
            Some('(') => {
                self.pos += 1;
                let v = self.sum()?;
                if self.peek() != Some(')') {
                    return Err(self.err("expected )"));
                }
                self.pos += 1;
                Ok(v)
            }
            Some('-') => {
                self.pos += 1;
                Ok(self.atom()?.neg())
            }
            Some(c) if c.is_ascii_digit() || c == '.' => {
                let start = self.pos;
                while let Some(c) = self.peek() {
                    let signed_exp = matches!(c, '+' | '-') && self.toks.get(self.pos - 1) == Some(&'e');
                    if !(c.is_ascii_digit() || c == '.' || c == 'e' || signed_exp) {
                        break;
                    }
                    self.pos += 1;
                }
                let s: String = self.toks[start..self.pos].iter().collect();
                Ok(Poly2::constant(rational::parse(&s)?))
            }
            _ => Err(self.err("unexpected token")),
        }
    }
}

impl fmt::Display for Poly2 {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        let mut first = true;
        for (&(i, j), c) in self.terms.iter().rev() {
            let neg = c.is_negative();
            if first {
                if neg {
                    write!(f, "-")?;
                }
            } else {
                write!(f, " {} ", if neg { '-' } else { '+' })?;
            }
            first = false;
            let a = c.abs();
            let mut parts = Vec::new();
            if !a.is_one() || (i == 0 && j == 0) {
                parts.push(if a.is_integer() { a.to_string() } else { format!("({a})") });
            }
            for (v, e) in [("x", i), ("y", j)] {
                match e {
                    0 => {}
                    1 => parts.push(v.to_string()),
                    _ => parts.push(format!("{v}^{e}")),
                }
            }
            write!(f, "{}", parts.join("*"))?;
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numeric::rational::rat;

    #[test]
    fn affine_substitution_matches_evaluation() {
        let f = Poly2::parse("x^2 y - 3x + y/2 + 1").unwrap();
        let (px, qx, py, qy) = (rat(2, 3), rat(-1, 5), rat(-7, 2), rat(1, 9));
        let g = f.substitute_affine(&px, &qx, &py, &qy);
        for (x, y) in [(rat(1, 2), rat(3, 7)), (int(-2), int(5))] {
            assert_eq!(g.eval(&x, &y), f.eval(&(&px * &x + &qx), &(&py * &y + &qy)));
        }
    }

    #[test]
    fn parse_and_differentiate() {
        let p = Poly2::parse("-(x-1)^2 - (y-1)^2").unwrap();
        assert_eq!(p.eval(&int(1), &int(1)), int(0));
        assert_eq!(p.dx().eval(&int(0), &int(5)), int(2));
        assert_eq!(Poly2::parse("x + 2y").unwrap(), Poly2::linear(int(1), int(2), int(0)));
        assert_eq!(Poly2::parse("0.5*x*y").unwrap().coeff(1, 1), rat(1, 2));
        assert!(Poly2::parse("x/y").is_err());
        assert_eq!(Poly2::parse("1e-3 - x").unwrap().coeff(0, 0), rat(1, 1000));
        let q = Poly2::parse(&p.to_string()).unwrap();
        assert_eq!(p, q);
    }

    #[test]
    fn range_is_exact_when_monotone() {
        let p = Poly2::parse("x*y + x").unwrap();
        let b = RatInterval::new(int(1), int(2));
        assert_eq!(p.range(&b, &b), RatInterval::new(int(2), int(6)));
        let q = Poly2::parse("(x-1)^2").unwrap();
        let r = q.range(&RatInterval::new(int(0), int(2)), &b);
        assert!(r.contains(&int(0)) && r.contains(&int(1)));
    }
}
