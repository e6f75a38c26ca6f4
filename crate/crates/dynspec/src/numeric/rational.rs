use num_bigint::{BigInt, Sign};
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};
use std::fmt;

use crate::error::{Error, Result};

pub type Rat = BigRational;

pub fn rat(n: i64, d: i64) -> Rat {
    Rat::new(BigInt::from(n), BigInt::from(d))
}

pub fn int(n: i64) -> Rat {
    Rat::from_integer(BigInt::from(n))
}

pub fn pow2(e: i64) -> Rat {
    if e >= 0 {
        Rat::from_integer(BigInt::one() << e as usize)
    } else {
        Rat::new(BigInt::one(), BigInt::one() << (-e) as usize)
    }
}

fn big_to_f64_scaled(n: &BigInt) -> (f64, i64) {
    let bits = n.bits() as i64;
    if bits <= 1000 {
        return (n.to_f64().unwrap_or(f64::NAN), 0);
    }
    let shift = bits - 64;
    let top: BigInt = n >> shift as usize;
    (top.to_f64().unwrap_or(f64::NAN), shift)
}

/// Nearest-ish `f64` for rationals whose numerator and denominator may overflow `f64`.
pub fn to_f64(x: &Rat) -> f64 {
    if let (Some(n), Some(d)) = (x.numer().to_f64(), x.denom().to_f64()) {
        if n.is_finite() && d.is_finite() && d != 0.0 {
            return n / d;
        }
    }
    let (n, en) = big_to_f64_scaled(x.numer());
    let (d, ed) = big_to_f64_scaled(x.denom());
    n / d * 2f64.powi((en - ed) as i32)
}

/// Natural logarithm of a positive rational, robust to huge numerators and denominators.
pub fn ln(x: &Rat) -> f64 {
    assert!(x.is_positive(), "ln of non-positive rational");
    let (n, en) = big_to_f64_scaled(x.numer());
    let (d, ed) = big_to_f64_scaled(x.denom());
    n.ln() - d.ln() + (en - ed) as f64 * std::f64::consts::LN_2
}

/// Exact rational value of a finite `f64`.
pub fn from_f64(x: f64) -> Option<Rat> {
    Rat::from_float(x)
}

/// Parses `"3"`, `"-7/4"`, `"0.45"`, `"1e-3"` or `"2.5e2"` into an exact rational.
pub fn parse(s: &str) -> Result<Rat> {
    let s = s.trim();
    let bad = || Error::Input(format!("not a rational number: {s:?}"));
    if let Some((n, d)) = s.split_once('/') {
        let n: BigInt = n.trim().parse().map_err(|_| bad())?;
        let d: BigInt = d.trim().parse().map_err(|_| bad())?;
        if d.is_zero() {
            return Err(bad());
        }
        return Ok(Rat::new(n, d));
    }
    let (mant, exp) = match s.find(['e', 'E']) {
        Some(i) => (&s[..i], s[i + 1..].parse::<i32>().map_err(|_| bad())?),
        None => (s, 0),
    };
    let (neg, mant) = match mant.strip_prefix('-') {
        Some(m) => (true, m),
        None => (false, mant.strip_prefix('+').unwrap_or(mant)),
    };
    let (ip, fp) = mant.split_once('.').unwrap_or((mant, ""));
    if ip.is_empty() && fp.is_empty() {
        return Err(bad());
    }
    let digits = format!("{ip}{fp}");
    if !digits.chars().all(|c| c.is_ascii_digit()) {
        return Err(bad());
    }
    let n: BigInt = digits.parse().map_err(|_| bad())?;
    let scale = exp - fp.len() as i32;
    let ten = BigInt::from(10);
    let mut v = if scale >= 0 {
        Rat::from_integer(n * num_traits::pow(ten, scale as usize))
    } else {
        Rat::new(n, num_traits::pow(ten, (-scale) as usize))
    };
    if neg {
        v = -v;
    }
    Ok(v)
}

/// Floor of `x * 2^bits` as an integer, i.e. the dyadic rounding of `x` downward.
pub fn floor_dyadic(x: &Rat, bits: u32) -> Rat {
    let scaled = x.numer() << bits as usize;
    let q = scaled.div_floor(x.denom());
    Rat::new(q, BigInt::one() << bits as usize)
}

pub fn ceil_dyadic(x: &Rat, bits: u32) -> Rat {
    -floor_dyadic(&-x, bits)
}

/// Integer square root with floor semantics.
pub fn isqrt(n: &BigInt) -> BigInt {
    assert!(n.sign() != Sign::Minus);
    n.sqrt()
}

pub fn is_perfect_square(n: &BigInt) -> bool {
    if n.is_negative() {
        return false;
    }
    let r = n.sqrt();
    &r * &r == *n
}

/// Closed interval with exact rational endpoints.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct RatInterval {
    pub lo: Rat,
    pub hi: Rat,
}

impl RatInterval {
    pub fn new(lo: Rat, hi: Rat) -> Self {
        debug_assert!(lo <= hi, "inverted interval");
        Self { lo, hi }
    }

    pub fn point(x: Rat) -> Self {
        Self { lo: x.clone(), hi: x }
    }

    /// Interval spanning two points in either order.
    pub fn hull_of(a: Rat, b: Rat) -> Self {
        if a <= b {
            Self { lo: a, hi: b }
        } else {
            Self { lo: b, hi: a }
        }
    }

    pub fn width(&self) -> Rat {
        &self.hi - &self.lo
    }

    pub fn mid(&self) -> Rat {
        (&self.lo + &self.hi) / int(2)
    }

    pub fn contains(&self, x: &Rat) -> bool {
        &self.lo <= x && x <= &self.hi
    }

    pub fn contains_interval(&self, o: &RatInterval) -> bool {
        self.lo <= o.lo && o.hi <= self.hi
    }

    pub fn intersects(&self, o: &RatInterval) -> bool {
        self.lo <= o.hi && o.lo <= self.hi
    }

    pub fn excludes_zero(&self) -> bool {
        self.lo.is_positive() || self.hi.is_negative()
    }

    pub fn join(&self, o: &RatInterval) -> RatInterval {
        RatInterval {
            lo: self.lo.clone().min(o.lo.clone()),
            hi: self.hi.clone().max(o.hi.clone()),
        }
    }

    pub fn add(&self, o: &RatInterval) -> RatInterval {
        RatInterval { lo: &self.lo + &o.lo, hi: &self.hi + &o.hi }
    }

    pub fn neg(&self) -> RatInterval {
        RatInterval { lo: -&self.hi, hi: -&self.lo }
    }

    pub fn sub(&self, o: &RatInterval) -> RatInterval {
        self.add(&o.neg())
    }

    pub fn scale(&self, k: &Rat) -> RatInterval {
        RatInterval::hull_of(&self.lo * k, &self.hi * k)
    }

    pub fn shift(&self, c: &Rat) -> RatInterval {
        RatInterval { lo: &self.lo + c, hi: &self.hi + c }
    }

    pub fn mul(&self, o: &RatInterval) -> RatInterval {
        let c = [&self.lo * &o.lo, &self.lo * &o.hi, &self.hi * &o.lo, &self.hi * &o.hi];
        let lo = c.iter().min().unwrap().clone();
        let hi = c.iter().max().unwrap().clone();
        RatInterval { lo, hi }
    }

    pub fn abs(&self) -> RatInterval {
        if !self.lo.is_negative() {
            self.clone()
        } else if !self.hi.is_positive() {
            self.neg()
        } else {
            RatInterval { lo: Rat::zero(), hi: self.hi.clone().max(-&self.lo) }
        }
    }

    pub fn powi(&self, k: u32) -> RatInterval {
        let mut acc = RatInterval::point(Rat::one());
        if k % 2 == 0 {
            let a = self.abs();
            for _ in 0..k {
                acc = acc.mul(&a);
            }
        } else {
            for _ in 0..k {
                acc = acc.mul(self);
            }
        }
        acc
    }

    pub fn to_f64_pair(&self) -> (f64, f64) {
        (to_f64(&self.lo), to_f64(&self.hi))
    }
}

impl fmt::Display for RatInterval {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[{}, {}]", self.lo, self.hi)
    }
}
