use num_traits::One;
use serde::Serialize;

use crate::cantor::{cylinder, word_map, CantorPresentation, Cell, Composite, PresentationKind};
use crate::dimension::{dimension_bounds, product_bounds, DimensionBounds};
use crate::error::{Error, Result};
use crate::numeric::{Mobius, Rat, RatInterval};
use crate::symbolic::{SymbolicSequence, TransitionMatrix};

/// `Λ ≅ K^s × K^u` for affine presentations, with `Π(θ) = (h^s(θ⁻), h^u(θ⁺))`
/// where `θ⁺ = (θ_0, θ_1, …)` and `θ⁻ = (θ_0, θ_{-1}, …)`.
#[derive(Clone, Debug)]
pub struct ProductHorseshoe {
    pub stable: CantorPresentation,
    pub unstable: CantorPresentation,
}

#[derive(Clone, Debug, Serialize)]
pub struct ProductDimension {
    pub stable: DimensionBounds,
    pub unstable: DimensionBounds,
    pub lower: f64,
    pub upper: f64,
}

fn exact_map(c: Composite) -> Mobius {
    match c {
        Composite::Exact(m) => m,
        Composite::Chain(_) => unreachable!("affine presentations compose exactly"),
    }
}

/// `h(seg · per^∞)` for a one-sided eventually periodic word.
pub(crate) fn coding_point(k: &CantorPresentation, seg: &[usize], per: &[usize]) -> Rat {
    let mut cyc = per.to_vec();
    cyc.push(per[0]);
    let fix = exact_map(word_map(k, &cyc));
    // affine with slope p in (-1, 1): the fixed point is q / (1 - p)
    let p = &fix.a / &fix.d;
    let q = &fix.b / &fix.d;
    let y = q / (Rat::one() - p);
    if seg.is_empty() {
        return y;
    }
    let mut w = seg.to_vec();
    w.push(per[0]);
    exact_map(word_map(k, &w)).apply(&y)
}

impl ProductHorseshoe {
    /// The stable factor is read along the past, so it uses the transposed transitions.
    pub fn new(stable: CantorPresentation, unstable: CantorPresentation) -> Result<Self> {
        for k in [&stable, &unstable] {
            if k.kind() != PresentationKind::Affine {
                return Err(Error::Presentation(format!("{} is not piecewise affine", k.name)));
            }
        }
        if stable.matrix() != &unstable.matrix().transpose() {
            return Err(Error::Presentation("stable transitions must be the transpose of the unstable ones".into()));
        }
        Ok(Self { stable, unstable })
    }

    /// `K × K` for a presentation with symmetric transitions.
    pub fn symmetric(k: CantorPresentation) -> Result<Self> {
        Self::new(k.clone(), k)
    }

    pub fn matrix(&self) -> &TransitionMatrix {
        self.unstable.matrix()
    }

    /// The chart rectangle: hulls of the two factors.
    pub fn chart(&self) -> (Cell, Cell) {
        (self.stable.hull(), self.unstable.hull())
    }

    pub fn future(theta: &SymbolicSequence) -> (Vec<usize>, Vec<usize>) {
        theta.right_part(0)
    }

    pub fn past(theta: &SymbolicSequence) -> (Vec<usize>, Vec<usize>) {
        let (left, seg) = theta.left_part(0);
        (seg.into_iter().rev().collect(), left.into_iter().rev().collect())
    }

    /// Exact `Π(θ)`.
    pub fn conjugacy_exact(&self, theta: &SymbolicSequence) -> Result<(Rat, Rat)> {
        theta.check_admissible(self.matrix())?;
        let (fs, fp) = Self::future(theta);
        let (ps, pp) = Self::past(theta);
        Ok((coding_point(&self.stable, &ps, &pp), coding_point(&self.unstable, &fs, &fp)))
    }

    /// Box containing `Π(θ)` from the symbols on `[-(depth-1), depth-1]`.
    pub fn conjugacy_point(&self, theta: &SymbolicSequence, depth: usize) -> Result<(RatInterval, RatInterval)> {
        theta.check_admissible(self.matrix())?;
        let d = depth.max(1) as i64;
        let fw = theta.window(0, d - 1);
        let mut pw = theta.window(-(d - 1), 0);
        pw.reverse();
        Ok((cylinder(&self.stable, &pw).outer, cylinder(&self.unstable, &fw).outer))
    }

    /// Box for the window `[-r, r]` (`window.len() = 2r + 1`).
    pub fn window_box(&self, window: &[usize]) -> (RatInterval, RatInterval) {
        let r = window.len() / 2;
        let past: Vec<usize> = window[..=r].iter().rev().copied().collect();
        (cylinder(&self.stable, &past).outer, cylinder(&self.unstable, &window[r..]).outer)
    }

    /// The model map `φ` near a point coded by `θ_0 θ_1`: `Π(σθ) = φ(Π(θ))`.
    pub fn step(&self, a: usize, b: usize, p: &(Rat, Rat)) -> Result<(Rat, Rat)> {
        if !self.matrix().allowed(a, b) {
            return Err(Error::Inadmissible { from: a, to: b, location: "model step".into() });
        }
        let fs = exact_map(word_map(&self.stable, &[b, a]));
        let fu = exact_map(word_map(&self.unstable, &[a, b]));
        Ok((fs.apply(&p.0), fu.inverse().apply(&p.1)))
    }

    pub fn dimension(&self, depth: usize) -> Result<ProductDimension> {
        let s = dimension_bounds(&self.stable, depth)?;
        let u = dimension_bounds(&self.unstable, depth)?;
        let (lower, upper) = product_bounds(&s, &u);
        Ok(ProductDimension { stable: s, unstable: u, lower, upper })
    }

    /// Sup of the contraction rates of both factors.
    pub fn contraction(&self) -> Rat {
        let (a, b) = (self.stable.max_contraction(), self.unstable.max_contraction());
        if a > b { a } else { b }
    }
}
