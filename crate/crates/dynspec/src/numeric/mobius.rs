use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};

use super::rational::{int, Rat, RatInterval};
use super::surd::QuadSurd;

/// `x -> (a x + b) / (c x + d)` with rational coefficients.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Mobius {
    pub a: Rat,
    pub b: Rat,
    pub c: Rat,
    pub d: Rat,
}

impl Mobius {
    pub fn new(a: Rat, b: Rat, c: Rat, d: Rat) -> Self {
        let m = Self { a, b, c, d };
        assert!(!m.det().is_zero(), "degenerate Mobius map");
        m
    }

    pub fn identity() -> Self {
        Self::new(int(1), int(0), int(0), int(1))
    }

    pub fn affine(slope: Rat, offset: Rat) -> Self {
        Self::new(slope, offset, int(0), int(1))
    }

    /// `x -> k + 1/x`, one continued-fraction digit.
    pub fn cf_digit(k: u64) -> Self {
        Self::new(Rat::from_integer(BigInt::from(k)), int(1), int(1), int(0))
    }

    /// `x -> 1/(k + x)`, the inverse branch of the Gauss map for digit `k`.
    pub fn gauss_inverse(k: u64) -> Self {
        Self::new(int(0), int(1), int(1), Rat::from_integer(BigInt::from(k)))
    }

    pub fn det(&self) -> Rat {
        &self.a * &self.d - &self.b * &self.c
    }

    pub fn is_affine(&self) -> bool {
        self.c.is_zero()
    }

    /// `self ∘ o`.
    pub fn compose(&self, o: &Mobius) -> Mobius {
        Mobius {
            a: &self.a * &o.a + &self.b * &o.c,
            b: &self.a * &o.b + &self.b * &o.d,
            c: &self.c * &o.a + &self.d * &o.c,
            d: &self.c * &o.b + &self.d * &o.d,
        }
    }

    pub fn inverse(&self) -> Mobius {
        Mobius { a: self.d.clone(), b: -&self.b, c: -&self.c, d: self.a.clone() }
    }

    pub fn apply(&self, x: &Rat) -> Rat {
        let den = &self.c * x + &self.d;
        assert!(!den.is_zero(), "Mobius pole hit");
        (&self.a * x + &self.b) / den
    }

    /// Image of `+inf`.
    pub fn at_infinity(&self) -> Option<Rat> {
        if self.c.is_zero() {
            None
        } else {
            Some(&self.a / &self.c)
        }
    }

    pub fn apply_surd(&self, x: &QuadSurd) -> QuadSurd {
        let num = x.scale(&self.a).add_rat(&self.b);
        let den = x.scale(&self.c).add_rat(&self.d);
        num.div(&den)
    }

    pub fn pole_outside(&self, iv: &RatInterval) -> bool {
        if self.c.is_zero() {
            return true;
        }
        let p = -&self.d / &self.c;
        !iv.contains(&p)
    }

    /// Exact image of an interval that avoids the pole.
    pub fn apply_interval(&self, iv: &RatInterval) -> RatInterval {
        debug_assert!(self.pole_outside(iv));
        RatInterval::hull_of(self.apply(&iv.lo), self.apply(&iv.hi))
    }

    pub fn preserves_orientation(&self) -> bool {
        self.det().is_positive()
    }

    /// Exact range of `|f'(x)| = |det| / (c x + d)^2` over an interval avoiding the pole.
    pub fn derivative_abs_range(&self, iv: &RatInterval) -> RatInterval {
        let det = self.det().abs();
        if self.c.is_zero() {
            let v = det / (&self.d * &self.d);
            return RatInterval::point(v);
        }
        let e0 = (&self.c * &iv.lo + &self.d).abs();
        let e1 = (&self.c * &iv.hi + &self.d).abs();
        let (small, large) = if e0 <= e1 { (e0, e1) } else { (e1, e0) };
        RatInterval::new(&det / (&large * &large), &det / (&small * &small))
    }

    pub fn derivative_at(&self, x: &Rat) -> Rat {
        let den = &self.c * x + &self.d;
        self.det() / (&den * &den)
    }

    /// Fixed points as quadratic surds, sorted ascending.
    pub fn fixed_points(&self) -> Vec<QuadSurd> {
        if self.c.is_zero() {
            let s = &self.a / &self.d;
            if s.is_one() {
                return vec![];
            }
            let x = &self.b / (&self.d - &self.a);
            return vec![QuadSurd::rational(x)];
        }
        // c x^2 + (d - a) x - b = 0
        let qa = self.c.clone();
        let qb = &self.d - &self.a;
        let qc = -&self.b;
        let disc = &qb * &qb - int(4) * &qa * &qc;
        if disc.is_negative() {
            return vec![];
        }
        let lcm = disc.denom().clone();
        let rad = disc.numer() * &lcm;
        let scale = Rat::new(BigInt::one(), lcm) / (int(2) * &qa);
        let base = -&qb / (int(2) * &qa);
        let r1 = QuadSurd::new(base.clone(), scale.clone(), rad.clone());
        let r2 = QuadSurd::new(base, -scale, rad);
        let mut v = vec![r1, r2];
        v.sort();
        v.dedup();
        v
    }

    /// The fixed point at which `|f'| < 1`, if any.
    pub fn attracting_fixed_point(&self) -> Option<QuadSurd> {
        self.fixed_points().into_iter().find(|p| {
            let den = p.scale(&self.c).add_rat(&self.d);
            let den2 = den.mul(&den);
            let det = QuadSurd::rational(self.det().abs());
            det < den2.abs()
        })
    }
}
