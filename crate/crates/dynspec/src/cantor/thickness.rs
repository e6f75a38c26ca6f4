use serde::Serialize;

use super::cover::{build_cover, CylinderCover};
use super::presentation::CantorPresentation;
use crate::numeric::rational::to_f64;
use crate::numeric::Rat;
use num_traits::Signed;

/// Finite-stage Newhouse thickness.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(tag = "kind", content = "value", rename_all = "lowercase")]
pub enum Thickness {
    Finite(Rat),
    /// A single interval: no bounded gaps.
    Infinite,
}

impl Thickness {
    pub fn to_f64(&self) -> f64 {
        match self {
            Thickness::Finite(r) => to_f64(r),
            Thickness::Infinite => f64::INFINITY,
        }
    }

    pub fn at_least(&self, r: &Rat) -> bool {
        match self {
            Thickness::Finite(t) => t >= r,
            Thickness::Infinite => true,
        }
    }
}

/// Lower bound for the thickness of the depth-`depth` cover of `k`.
pub fn thickness(k: &CantorPresentation, depth: usize) -> Thickness {
    thickness_of_cover(&build_cover(k, depth))
}

/// Lower bound on `min over gaps of min(left bridge, right bridge) / gap` for the
/// union of the cover's cells, using inner enclosures for bridges and the
/// certified extent of each gap.
pub fn thickness_of_cover(cover: &CylinderCover) -> Thickness {
    let cells: Vec<_> = cover.cells.iter().map(|c| &c.cell).collect();
    let n = cells.len();
    if n < 2 {
        return Thickness::Infinite;
    }
    // gap i lies between cells i and i+1
    let upper: Vec<Rat> = (0..n - 1).map(|i| &cells[i + 1].inner.lo - &cells[i].inner.hi).collect();
    let lower: Vec<Rat> = (0..n - 1).map(|i| &cells[i + 1].outer.lo - &cells[i].outer.hi).collect();
    assert!(lower.iter().all(|g| g.is_positive()), "cover cells must be disjoint");
    let mut best: Option<Rat> = None;
    for i in 0..n - 1 {
        let mut j = i;
        while j > 0 && upper[j - 1] < lower[i] {
            j -= 1;
        }
        let left = &cells[i].inner.hi - &cells[j].inner.lo;
        let mut k = i + 1;
        while k < n - 1 && upper[k] < lower[i] {
            k += 1;
        }
        let right = &cells[k].inner.hi - &cells[i + 1].inner.lo;
        let r = left.min(right) / &upper[i];
        if best.as_ref().is_none_or(|b| r < *b) {
            best = Some(r);
        }
    }
    Thickness::Finite(best.unwrap())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numeric::rational::rat;

    #[test]
    fn middle_third_is_one() {
        let k = CantorPresentation::k_alpha(rat(1, 3)).unwrap();
        for d in 1..=6 {
            assert_eq!(thickness(&k, d), Thickness::Finite(rat(1, 1)), "depth {d}");
        }
    }

    #[test]
    fn k_alpha_closed_form() {
        let k = CantorPresentation::k_alpha(rat(3, 5)).unwrap();
        assert_eq!(thickness(&k, 1), Thickness::Finite(rat(1, 3)));
        let k = CantorPresentation::k_alpha(rat(2, 5)).unwrap();
        assert_eq!(thickness(&k, 4), Thickness::Finite(rat(3, 4)));
    }

    #[test]
    fn single_cell_is_infinite() {
        let k = CantorPresentation::k_alpha(rat(1, 3)).unwrap();
        let one = build_cover(&k, 2).with_prefix(&[0, 1]);
        assert_eq!(thickness_of_cover(&one), Thickness::Infinite);
    }

    #[test]
    fn c4_exceeds_one() {
        let k = CantorPresentation::continued_fraction(4).unwrap();
        for d in 2..=5 {
            assert!(thickness(&k, d).at_least(&rat(1, 1)), "depth {d}: {:?}", thickness(&k, d).to_f64());
        }
    }
}
