use serde::Serialize;

use super::branch::Composite;
use super::cover::{cylinder, word_map, Cell};
use super::presentation::CantorPresentation;
use crate::error::Result;
use crate::numeric::rational::to_f64;
use crate::numeric::{Rat, RatInterval};
use num_traits::{One, Zero};

/// Stage-`n` normalized map `k_n = B ∘ f` on `I(θ_0)`, where `f` sends `I(θ_0)` onto
/// the cylinder `I(θ_{-n} ... θ_0)` and `B` is the affine map from that cylinder back
/// onto `I(θ_0)` chosen so that `k_n` preserves orientation.
#[derive(Clone, Debug, Serialize)]
pub struct LimitGeometryApprox {
    /// `(θ_{-n}, ..., θ_0)`.
    pub word: Vec<usize>,
    pub stage: usize,
    /// Enclosure of `|I(θ^n)|`.
    pub scale: RatInterval,
    #[serde(skip)]
    map: Composite,
    #[serde(skip)]
    cyl: Cell,
    #[serde(skip)]
    base: Cell,
    #[serde(skip)]
    bits: u32,
}

pub fn limit_geometry(k: &CantorPresentation, theta_word: &[usize]) -> Result<LimitGeometryApprox> {
    if theta_word.is_empty() {
        return Err(crate::error::Error::Input("empty word".into()));
    }
    k.matrix().check_admissible(theta_word, "limit-geometry word")?;
    let cyl = cylinder(k, theta_word);
    let base = k.base_cell(*theta_word.last().unwrap()).clone();
    Ok(LimitGeometryApprox {
        word: theta_word.to_vec(),
        stage: theta_word.len() - 1,
        scale: RatInterval::new(cyl.inner.width(), cyl.outer.width()),
        map: word_map(k, theta_word),
        cyl,
        base,
        bits: k.bits,
    })
}

impl LimitGeometryApprox {
    pub fn domain(&self) -> &RatInterval {
        &self.base.outer
    }

    /// Enclosure of `k_n(x)` for `x` in `I(θ_0)`.
    pub fn eval(&self, x: &Rat) -> RatInterval {
        let keep = self.map.preserves_orientation();
        if let (Composite::Exact(m), Some((l0, h0)), Some((ln, hn))) = (&self.map, &self.base.exact, &self.cyl.exact) {
            let y = crate::numeric::QuadSurd::rational(m.apply(x));
            let ratio = h0.sub(l0).div(&hn.sub(ln));
            let off = if keep { y.sub(ln) } else { hn.sub(&y) };
            return l0.add(&off.mul(&ratio)).enclose(self.bits);
        }
        let y = self.map.image_outer(&RatInterval::point(x.clone()));
        let num = RatInterval::new(self.base.inner.width(), self.base.outer.width());
        let den = RatInterval::new(self.cyl.inner.width(), self.cyl.outer.width());
        let inv = RatInterval::new(Rat::one() / &den.hi, Rat::one() / &den.lo);
        let ratio = num.mul(&inv);
        let off = if keep {
            y.sub(&RatInterval::new(self.cyl.outer.lo.clone(), self.cyl.inner.lo.clone()))
        } else {
            RatInterval::new(self.cyl.inner.hi.clone(), self.cyl.outer.hi.clone()).sub(&y)
        };
        let off = RatInterval::new(off.lo.max(Rat::zero()), off.hi);
        off.mul(&ratio).add(&RatInterval::new(self.base.outer.lo.clone(), self.base.inner.lo.clone()))
    }

    /// Sampled `sup |k_n - other|` over `samples + 1` equally spaced points of `I(θ_0)`.
    pub fn sup_distance(&self, other: &LimitGeometryApprox, samples: usize) -> f64 {
        let d = self.domain();
        let w = d.width();
        (0..=samples)
            .map(|i| {
                let x = &d.lo + &w * Rat::new(i.into(), samples.into());
                let x = x.max(self.base.inner.lo.clone()).min(self.base.inner.hi.clone());
                let a = self.eval(&x);
                let b = other.eval(&x);
                (to_f64(&a.mid()) - to_f64(&b.mid())).abs()
            })
            .fold(0.0, f64::max)
    }
}
