use std::fmt;
use std::sync::Arc;

use num_traits::{One, Signed, Zero};
use serde_json::json;

use crate::error::{Error, Result};
use crate::numeric::{Mobius, Rat, RatInterval};

/// A monotone map known only through certified enclosures.
pub trait CertifiedMap: Send + Sync + fmt::Debug {
    /// An interval containing the image of `iv`.
    fn image_outer(&self, iv: &RatInterval) -> RatInterval;
    /// An interval contained in the image of `iv`.
    fn image_inner(&self, iv: &RatInterval) -> RatInterval;
    /// An interval containing `|f'|` on `iv`.
    fn derivative_abs(&self, iv: &RatInterval) -> RatInterval;
    fn preserves_orientation(&self) -> bool;
    fn to_json(&self) -> serde_json::Value;
}

/// Inverse branch `f_{a,b} : I(b) -> I(a)`.
#[derive(Clone, Debug)]
pub enum BranchMap {
    Mobius(Mobius),
    Custom(Arc<dyn CertifiedMap>),
}

impl BranchMap {
    pub fn is_mobius(&self) -> bool {
        matches!(self, BranchMap::Mobius(_))
    }

    pub fn is_affine(&self) -> bool {
        matches!(self, BranchMap::Mobius(m) if m.is_affine())
    }

    pub fn preserves_orientation(&self) -> bool {
        match self {
            BranchMap::Mobius(m) => m.preserves_orientation(),
            BranchMap::Custom(c) => c.preserves_orientation(),
        }
    }

    pub fn image_outer(&self, iv: &RatInterval) -> RatInterval {
        match self {
            BranchMap::Mobius(m) => m.apply_interval(iv),
            BranchMap::Custom(c) => c.image_outer(iv),
        }
    }

    pub fn image_inner(&self, iv: &RatInterval) -> RatInterval {
        match self {
            BranchMap::Mobius(m) => m.apply_interval(iv),
            BranchMap::Custom(c) => c.image_inner(iv),
        }
    }

    pub fn derivative_abs(&self, iv: &RatInterval) -> RatInterval {
        match self {
            BranchMap::Mobius(m) => m.derivative_abs_range(iv),
            BranchMap::Custom(c) => c.derivative_abs(iv),
        }
    }

    pub fn to_json(&self) -> serde_json::Value {
        match self {
            BranchMap::Mobius(m) if m.is_affine() => {
                json!({ "affine": [(&m.a / &m.d).to_string(), (&m.b / &m.d).to_string()] })
            }
            BranchMap::Mobius(m) => {
                json!({ "moebius": [m.a.to_string(), m.b.to_string(), m.c.to_string(), m.d.to_string()] })
            }
            BranchMap::Custom(c) => c.to_json(),
        }
    }
}

/// Strictly monotone piecewise-linear map through the given breakpoints.
#[derive(Clone, Debug)]
pub struct PiecewiseLinear {
    xs: Vec<Rat>,
    ys: Vec<Rat>,
}

impl PiecewiseLinear {
    pub fn new(points: Vec<(Rat, Rat)>) -> Result<Self> {
        if points.len() < 2 {
            return Err(Error::Presentation("a table map needs at least two points".into()));
        }
        let (xs, ys): (Vec<Rat>, Vec<Rat>) = points.into_iter().unzip();
        let inc = ys[1] > ys[0];
        for i in 1..xs.len() {
            if xs[i] <= xs[i - 1] {
                return Err(Error::Presentation("table abscissae must increase".into()));
            }
            if (ys[i] > ys[i - 1]) != inc || ys[i] == ys[i - 1] {
                return Err(Error::Presentation("table map must be strictly monotone".into()));
            }
        }
        Ok(Self { xs, ys })
    }

    pub fn eval(&self, x: &Rat) -> Rat {
        let n = self.xs.len();
        let k = match self.xs.iter().position(|t| t >= x) {
            Some(0) => 1,
            Some(k) => k,
            None => n - 1,
        };
        let (x0, x1, y0, y1) = (&self.xs[k - 1], &self.xs[k], &self.ys[k - 1], &self.ys[k]);
        y0 + (y1 - y0) * (x - x0) / (x1 - x0)
    }

    fn slope(&self, k: usize) -> Rat {
        (&self.ys[k + 1] - &self.ys[k]) / (&self.xs[k + 1] - &self.xs[k])
    }
}

impl CertifiedMap for PiecewiseLinear {
    fn image_outer(&self, iv: &RatInterval) -> RatInterval {
        RatInterval::hull_of(self.eval(&iv.lo), self.eval(&iv.hi))
    }

    fn image_inner(&self, iv: &RatInterval) -> RatInterval {
        self.image_outer(iv)
    }

    fn derivative_abs(&self, iv: &RatInterval) -> RatInterval {
        let n = self.xs.len();
        let mut out: Option<RatInterval> = None;
        for k in 0..n - 1 {
            let first = k == 0;
            let last = k == n - 2;
            let touches = (first || iv.hi >= self.xs[k]) && (last || iv.lo <= self.xs[k + 1]);
            if touches {
                let s = RatInterval::point(self.slope(k).abs());
                out = Some(match out {
                    None => s,
                    Some(o) => o.join(&s),
                });
            }
        }
        out.expect("some piece meets every interval")
    }

    fn preserves_orientation(&self) -> bool {
        self.ys[1] > self.ys[0]
    }

    fn to_json(&self) -> serde_json::Value {
        let pts: Vec<[String; 2]> =
            self.xs.iter().zip(&self.ys).map(|(x, y)| [x.to_string(), y.to_string()]).collect();
        json!({ "table": pts })
    }
}

/// A map to be composed: affine, Möbius, or a chain that includes certified-only pieces.
#[derive(Clone, Debug)]
pub enum Composite {
    Exact(Mobius),
    /// Maps listed outermost first.
    Chain(Vec<BranchMap>),
}

impl Composite {
    pub fn identity() -> Self {
        Composite::Exact(Mobius::identity())
    }

    /// `self ∘ g`.
    pub fn then_inner(&self, g: &BranchMap) -> Self {
        match (self, g) {
            (Composite::Exact(m), BranchMap::Mobius(n)) => Composite::Exact(m.compose(n)),
            (Composite::Exact(m), BranchMap::Custom(_)) => {
                let mut v = Vec::new();
                if *m != Mobius::identity() {
                    v.push(BranchMap::Mobius(m.clone()));
                }
                v.push(g.clone());
                Composite::Chain(v)
            }
            (Composite::Chain(v), _) => {
                let mut v = v.clone();
                v.push(g.clone());
                Composite::Chain(v)
            }
        }
    }

    pub fn preserves_orientation(&self) -> bool {
        match self {
            Composite::Exact(m) => m.preserves_orientation(),
            Composite::Chain(v) => v.iter().filter(|g| !g.preserves_orientation()).count() % 2 == 0,
        }
    }

    pub fn image_outer(&self, iv: &RatInterval) -> RatInterval {
        match self {
            Composite::Exact(m) => m.apply_interval(iv),
            Composite::Chain(v) => v.iter().rev().fold(iv.clone(), |j, g| g.image_outer(&j)),
        }
    }

    pub fn image_inner(&self, iv: &RatInterval) -> RatInterval {
        match self {
            Composite::Exact(m) => m.apply_interval(iv),
            Composite::Chain(v) => v.iter().rev().fold(iv.clone(), |j, g| g.image_inner(&j)),
        }
    }

    /// Enclosure of `|F'|` on `iv` by the chain rule.
    pub fn derivative_abs(&self, iv: &RatInterval) -> RatInterval {
        match self {
            Composite::Exact(m) => m.derivative_abs_range(iv),
            Composite::Chain(v) => {
                let mut j = iv.clone();
                let mut d = RatInterval::point(Rat::one());
                for g in v.iter().rev() {
                    d = d.mul(&g.derivative_abs(&j));
                    j = g.image_outer(&j);
                }
                d
            }
        }
    }
}

pub(crate) fn check_contracting(map: &BranchMap, domain: &RatInterval, what: &str) -> Result<()> {
    let d = map.derivative_abs(domain);
    if d.hi >= Rat::one() || d.lo.is_zero() {
        return Err(Error::Presentation(format!(
            "branch {what} is not certified contracting on its domain (|f'| in {d})"
        )));
    }
    if let BranchMap::Mobius(m) = map {
        if !m.pole_outside(domain) {
            return Err(Error::Presentation(format!("branch {what} has a pole on its domain")));
        }
    }
    Ok(())
}
