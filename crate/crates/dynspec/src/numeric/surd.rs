//! Exact real quadratic irrationals and finite sums of them.
//!
//! [`QuadSurd`] is an element `a + b*sqrt(d)` of a single real quadratic field.
//! [`SurdSum`] is a rational plus a finite sum of square-root terms over
//! distinct squarefree radicands, which is enough to hold a value such as
//! `[a0; a1, ...] + [0; a_-1, ...]` whose two halves live in different fields.

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Serialize, Serializer};
use std::cmp::Ordering;
use std::collections::BTreeMap;
use std::fmt;

use super::rational::{self, Rat, RatInterval};

const TRIAL_LIMIT: u64 = 1 << 22;

/// Splits `n > 0` as `s^2 * d` with `d` squarefree whenever trial division
/// reaches the cube root of the cofactor (always for `n < 2^66`).
pub fn squarefree_split(n: &BigInt) -> (BigInt, BigInt) {
    assert!(n.is_positive(), "squarefree_split needs a positive integer");
    let mut m = n.clone();
    let mut s = BigInt::one();
    let mut d = BigInt::one();
    let mut p: u64 = 2;
    while p <= TRIAL_LIMIT {
        let pb = BigInt::from(p);
        if &pb * &pb * &pb > m {
            break;
        }
        let p2 = &pb * &pb;
        while (&m % &p2).is_zero() {
            m /= &p2;
            s *= &pb;
        }
        if (&m % &pb).is_zero() {
            m /= &pb;
            d *= &pb;
        }
        p += if p == 2 { 1 } else { 2 };
    }
    if rational::is_perfect_square(&m) {
        s *= m.sqrt();
    } else {
        d *= m;
    }
    (s, d)
}

fn sqrt_enclosure(d: &BigInt, bits: u32) -> RatInterval {
    let scaled: BigInt = d << (2 * bits as usize);
    let r = scaled.sqrt();
    let den = BigInt::one() << bits as usize;
    if &r * &r == scaled {
        let v = Rat::new(r, den);
        RatInterval::point(v)
    } else {
        RatInterval::new(Rat::new(r.clone(), den.clone()), Rat::new(r + 1, den))
    }
}

/// `a + b*sqrt(d)`; `d` is squarefree and greater than one, or `b = 0` and `d = 1`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct QuadSurd {
    pub a: Rat,
    pub b: Rat,
    pub d: BigInt,
}

impl QuadSurd {
    pub fn rational(a: Rat) -> Self {
        Self { a, b: Rat::zero(), d: BigInt::one() }
    }

    /// `a + b*sqrt(radicand)` for any non-negative integer radicand, normalized.
    pub fn new(a: Rat, b: Rat, radicand: BigInt) -> Self {
        assert!(!radicand.is_negative(), "negative radicand");
        if b.is_zero() || radicand.is_zero() {
            return Self::rational(a);
        }
        let (s, d) = squarefree_split(&radicand);
        let b = b * Rat::from_integer(s);
        if d.is_one() {
            Self::rational(a + b)
        } else {
            Self { a, b, d }
        }
    }

    pub fn sqrt_of(n: i64) -> Self {
        Self::new(Rat::zero(), Rat::one(), BigInt::from(n))
    }

    pub fn is_rational(&self) -> bool {
        self.b.is_zero()
    }

    fn field(&self, o: &QuadSurd) -> BigInt {
        match (self.is_rational(), o.is_rational()) {
            (true, _) => o.d.clone(),
            (_, true) => self.d.clone(),
            _ => {
                assert_eq!(self.d, o.d, "quadratic surds from different fields");
                self.d.clone()
            }
        }
    }

    fn make(a: Rat, b: Rat, d: BigInt) -> Self {
        if b.is_zero() {
            Self::rational(a)
        } else {
            Self { a, b, d }
        }
    }

    pub fn add(&self, o: &QuadSurd) -> QuadSurd {
        let d = self.field(o);
        Self::make(&self.a + &o.a, &self.b + &o.b, d)
    }

    pub fn neg(&self) -> QuadSurd {
        Self::make(-&self.a, -&self.b, self.d.clone())
    }

    pub fn sub(&self, o: &QuadSurd) -> QuadSurd {
        self.add(&o.neg())
    }

    pub fn mul(&self, o: &QuadSurd) -> QuadSurd {
        let d = self.field(o);
        let dr = Rat::from_integer(d.clone());
        let a = &self.a * &o.a + &self.b * &o.b * dr;
        let b = &self.a * &o.b + &self.b * &o.a;
        Self::make(a, b, d)
    }

    pub fn conj(&self) -> QuadSurd {
        Self::make(self.a.clone(), -&self.b, self.d.clone())
    }

    /// Field norm `a^2 - d b^2`.
    pub fn norm(&self) -> Rat {
        &self.a * &self.a - &self.b * &self.b * Rat::from_integer(self.d.clone())
    }

    pub fn recip(&self) -> QuadSurd {
        let n = self.norm();
        assert!(!n.is_zero(), "division by zero surd");
        let c = self.conj();
        Self::make(c.a / &n, c.b / &n, c.d)
    }

    pub fn div(&self, o: &QuadSurd) -> QuadSurd {
        self.mul(&o.recip())
    }

    pub fn add_rat(&self, r: &Rat) -> QuadSurd {
        Self::make(&self.a + r, self.b.clone(), self.d.clone())
    }

    pub fn scale(&self, r: &Rat) -> QuadSurd {
        Self::make(&self.a * r, &self.b * r, self.d.clone())
    }

    pub fn signum(&self) -> Ordering {
        let sa = self.a.cmp(&Rat::zero());
        let sb = self.b.cmp(&Rat::zero());
        if sb == Ordering::Equal || sa == sb {
            return if sa == Ordering::Equal { sb } else { sa };
        }
        if sa == Ordering::Equal {
            return sb;
        }
        // a and b*sqrt(d) have opposite signs: compare magnitudes squared.
        let a2 = &self.a * &self.a;
        let b2d = &self.b * &self.b * Rat::from_integer(self.d.clone());
        match a2.cmp(&b2d) {
            Ordering::Greater => sa,
            Ordering::Less => sb,
            Ordering::Equal => Ordering::Equal,
        }
    }

    pub fn enclose(&self, bits: u32) -> RatInterval {
        if self.is_rational() {
            return RatInterval::point(self.a.clone());
        }
        sqrt_enclosure(&self.d, bits).scale(&self.b).shift(&self.a)
    }

    pub fn abs(&self) -> QuadSurd {
        if self.signum() == Ordering::Less {
            self.neg()
        } else {
            self.clone()
        }
    }

    pub fn to_f64(&self) -> f64 {
        if self.is_rational() {
            return rational::to_f64(&self.a);
        }
        rational::to_f64(&self.enclose(96).mid())
    }

    /// Numerator and denominator integers `(p, q, r)` with value `(p + q*sqrt(d))/r`.
    pub fn pqr(&self) -> (BigInt, BigInt, BigInt) {
        let r = self.a.denom().lcm(self.b.denom());
        let p = self.a.numer() * (&r / self.a.denom());
        let q = self.b.numer() * (&r / self.b.denom());
        (p, q, r)
    }
}

impl PartialOrd for QuadSurd {
    fn partial_cmp(&self, o: &Self) -> Option<Ordering> {
        Some(self.cmp(o))
    }
}

impl Ord for QuadSurd {
    fn cmp(&self, o: &Self) -> Ordering {
        self.sub(o).signum()
    }
}

impl fmt::Display for QuadSurd {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_rational() {
            return write!(f, "{}", self.a);
        }
        let (p, q, r) = self.pqr();
        let qs = if q.is_one() {
            String::new()
        } else if q == -BigInt::one() {
            "-".to_string()
        } else {
            format!("{q}*")
        };
        let body = if p.is_zero() {
            format!("{qs}sqrt({})", self.d)
        } else if q.is_negative() {
            format!("{p} - {}sqrt({})", qs.trim_start_matches('-'), self.d)
        } else {
            format!("{p} + {qs}sqrt({})", self.d)
        };
        if r.is_one() {
            write!(f, "{body}")
        } else {
            write!(f, "({body})/{r}")
        }
    }
}

impl Serialize for QuadSurd {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&self.to_string())
    }
}

/// A rational plus square-root terms over distinct squarefree radicands.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Default)]
pub struct SurdSum {
    pub rational: Rat,
    pub terms: BTreeMap<BigInt, Rat>,
}

impl From<QuadSurd> for SurdSum {
    fn from(q: QuadSurd) -> Self {
        let mut terms = BTreeMap::new();
        if !q.is_rational() {
            terms.insert(q.d, q.b);
        }
        SurdSum { rational: q.a, terms }
    }
}

impl From<Rat> for SurdSum {
    fn from(r: Rat) -> Self {
        SurdSum { rational: r, terms: BTreeMap::new() }
    }
}

impl SurdSum {
    pub fn zero() -> Self {
        Self::default()
    }

    pub fn is_rational(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn as_quad(&self) -> Option<QuadSurd> {
        match self.terms.len() {
            0 => Some(QuadSurd::rational(self.rational.clone())),
            1 => {
                let (d, b) = self.terms.iter().next().unwrap();
                Some(QuadSurd { a: self.rational.clone(), b: b.clone(), d: d.clone() })
            }
            _ => None,
        }
    }

    pub fn add(&self, o: &SurdSum) -> SurdSum {
        let mut out = self.clone();
        out.rational += &o.rational;
        for (d, b) in &o.terms {
            let e = out.terms.entry(d.clone()).or_insert_with(Rat::zero);
            *e += b;
            if e.is_zero() {
                out.terms.remove(d);
            }
        }
        out
    }

    pub fn neg(&self) -> SurdSum {
        SurdSum {
            rational: -&self.rational,
            terms: self.terms.iter().map(|(d, b)| (d.clone(), -b)).collect(),
        }
    }

    pub fn sub(&self, o: &SurdSum) -> SurdSum {
        self.add(&o.neg())
    }

    pub fn scale(&self, r: &Rat) -> SurdSum {
        if r.is_zero() {
            return SurdSum::zero();
        }
        SurdSum {
            rational: &self.rational * r,
            terms: self.terms.iter().map(|(d, b)| (d.clone(), b * r)).collect(),
        }
    }

    pub fn enclose(&self, bits: u32) -> RatInterval {
        let mut acc = RatInterval::point(self.rational.clone());
        for (d, b) in &self.terms {
            acc = acc.add(&sqrt_enclosure(d, bits).scale(b));
        }
        acc
    }

    pub fn signum(&self) -> Ordering {
        if let Some(q) = self.as_quad() {
            return q.signum();
        }
        let mut bits = 64;
        loop {
            let e = self.enclose(bits);
            if e.lo.is_positive() {
                return Ordering::Greater;
            }
            if e.hi.is_negative() {
                return Ordering::Less;
            }
            if bits >= 16384 {
                return rational::to_f64(&e.mid()).partial_cmp(&0.0).unwrap_or(Ordering::Equal);
            }
            bits *= 2;
        }
    }

    pub fn to_f64(&self) -> f64 {
        rational::to_f64(&self.enclose(96).mid())
    }
}

impl PartialOrd for SurdSum {
    fn partial_cmp(&self, o: &Self) -> Option<Ordering> {
        Some(self.cmp(o))
    }
}

impl Ord for SurdSum {
    fn cmp(&self, o: &Self) -> Ordering {
        if self == o {
            return Ordering::Equal;
        }
        self.sub(o).signum()
    }
}

impl fmt::Display for SurdSum {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if let Some(q) = self.as_quad() {
            return write!(f, "{q}");
        }
        write!(f, "{}", self.rational)?;
        for (d, b) in &self.terms {
            if b.is_negative() {
                write!(f, " - {}*sqrt({d})", -b)?;
            } else {
                write!(f, " + {b}*sqrt({d})")?;
            }
        }
        Ok(())
    }
}

impl Serialize for SurdSum {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&self.to_string())
    }
}

/// Decimal rendering of an exact value, for CSV and reports.
pub fn decimal(x: &SurdSum) -> String {
    format!("{:.15}", x.to_f64())
}

pub fn rat_decimal(x: &BigRational) -> String {
    let v = rational::to_f64(x);
    if v.is_finite() {
        format!("{v:.15}")
    } else {
        x.to_f64().map(|v| v.to_string()).unwrap_or_else(|| "nan".into())
    }
}
