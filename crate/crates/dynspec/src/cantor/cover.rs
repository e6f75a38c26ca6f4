use rayon::prelude::*;
use serde::Serialize;

use super::branch::Composite;
use super::interval_union::IntervalUnion;
use super::presentation::CantorPresentation;
use crate::numeric::{QuadSurd, Rat, RatInterval};
use num_traits::Zero;

/// An interval known through an outer and an inner enclosure, and exactly when possible.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Cell {
    pub outer: RatInterval,
    pub inner: RatInterval,
    #[serde(skip)]
    pub exact: Option<(QuadSurd, QuadSurd)>,
}

impl Cell {
    pub fn rational(iv: RatInterval) -> Self {
        let exact = Some((QuadSurd::rational(iv.lo.clone()), QuadSurd::rational(iv.hi.clone())));
        Self { outer: iv.clone(), inner: iv, exact }
    }

    pub fn from_surds(lo: QuadSurd, hi: QuadSurd, bits: u32) -> Self {
        let (lo, hi) = if lo <= hi { (lo, hi) } else { (hi, lo) };
        let el = lo.enclose(bits);
        let eh = hi.enclose(bits);
        let inner = if el.hi <= eh.lo { RatInterval::new(el.hi.clone(), eh.lo.clone()) } else { RatInterval::point(el.hi.clone()) };
        Self { outer: RatInterval::new(el.lo, eh.hi), inner, exact: Some((lo, hi)) }
    }

    pub fn is_exact_rational(&self) -> bool {
        self.outer == self.inner
    }

    /// Image under a composite map; exact whenever the map and the cell are.
    pub fn image(&self, f: &Composite, bits: u32) -> Cell {
        match (f, &self.exact) {
            (Composite::Exact(m), Some((lo, hi))) => {
                if lo.is_rational() && hi.is_rational() {
                    Cell::rational(m.apply_interval(&self.outer))
                } else {
                    Cell::from_surds(m.apply_surd(lo), m.apply_surd(hi), bits)
                }
            }
            _ => Cell { outer: f.image_outer(&self.outer), inner: f.image_inner(&self.inner), exact: None },
        }
    }

    /// Length bounds `(lower, upper)`.
    pub fn length_bounds(&self) -> (Rat, Rat) {
        (self.inner.width(), self.outer.width())
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct CoverCell {
    pub word: Vec<usize>,
    pub cell: Cell,
}

/// The cylinders `I(w)` of all admissible words `w` with `depth` letters, sorted by position.
#[derive(Clone, Debug, Serialize)]
pub struct CylinderCover {
    pub depth: usize,
    pub cells: Vec<CoverCell>,
}

impl CylinderCover {
    pub fn from_cells(depth: usize, mut cells: Vec<CoverCell>) -> Self {
        cells.sort_by(|a, b| a.cell.outer.lo.cmp(&b.cell.outer.lo).then_with(|| a.word.cmp(&b.word)));
        Self { depth, cells }
    }

    pub fn len(&self) -> usize {
        self.cells.len()
    }

    pub fn is_empty(&self) -> bool {
        self.cells.is_empty()
    }

    /// Outer enclosures merged into a union containing the cover.
    pub fn union(&self) -> IntervalUnion {
        IntervalUnion::from_intervals(self.cells.iter().map(|c| c.cell.outer.clone()).collect())
    }

    /// Sum of cell lengths (exact for rational cells, an upper bound otherwise).
    pub fn total_length(&self) -> Rat {
        self.cells.iter().fold(Rat::zero(), |acc, c| acc + c.cell.outer.width())
    }

    pub fn outer_intervals(&self) -> Vec<RatInterval> {
        self.cells.iter().map(|c| c.cell.outer.clone()).collect()
    }

    pub fn max_cell_length(&self) -> Rat {
        self.cells.iter().map(|c| c.cell.outer.width()).max().unwrap_or_else(Rat::zero)
    }

    /// Cells whose word starts with `prefix`.
    pub fn with_prefix(&self, prefix: &[usize]) -> CylinderCover {
        let cells = self.cells.iter().filter(|c| c.word.starts_with(prefix)).cloned().collect();
        CylinderCover { depth: self.depth, cells }
    }
}

/// Composite inverse branch `f_{w_0 w_1} ∘ ... ∘ f_{w_{n-2} w_{n-1}}` of a word.
pub fn word_map(k: &CantorPresentation, word: &[usize]) -> Composite {
    word.windows(2).fold(Composite::identity(), |c, p| c.then_inner(k.branch(p[0], p[1]).expect("admissible")))
}

/// The cylinder `I(w)`.
pub fn cylinder(k: &CantorPresentation, word: &[usize]) -> Cell {
    let last = *word.last().expect("nonempty word");
    k.base_cell(last).image(&word_map(k, word), k.bits)
}

/// All depth-`depth` cylinders; `depth = 1` gives the base intervals.
pub fn build_cover(k: &CantorPresentation, depth: usize) -> CylinderCover {
    assert!(depth >= 1, "depth must be at least one");
    build_cover_from(k, depth, &[])
}

/// Depth-`depth` cylinders whose words begin with `prefix` (the part of the set inside `I(prefix)`).
pub fn build_cover_from(k: &CantorPresentation, depth: usize, prefix: &[usize]) -> CylinderCover {
    let cells = word_maps(k, depth, prefix)
        .into_par_iter()
        .map(|(w, m)| {
            let cell = k.base_cell(*w.last().unwrap()).image(&m, k.bits);
            CoverCell { word: w, cell }
        })
        .collect();
    CylinderCover::from_cells(depth, cells)
}

/// Every admissible word of length `len` extending `prefix`, in lexicographic order,
/// paired with its composite inverse branch.
pub fn word_maps(k: &CantorPresentation, len: usize, prefix: &[usize]) -> Vec<(Vec<usize>, Composite)> {
    let b = k.matrix();
    let extend = |(w, m): (Vec<usize>, Composite)| -> Vec<(Vec<usize>, Composite)> {
        let last = *w.last().unwrap();
        b.successors(last)
            .map(|s| {
                let mut w2 = w.clone();
                w2.push(s);
                (w2, m.then_inner(k.branch(last, s).unwrap()))
            })
            .collect()
    };
    let mut stems: Vec<(Vec<usize>, Composite)> = if prefix.is_empty() {
        (0..k.size()).map(|a| (vec![a], Composite::identity())).collect()
    } else {
        vec![(prefix.to_vec(), word_map(k, prefix))]
    };
    while stems.len() < 64 && stems.first().is_some_and(|s| s.0.len() < len) {
        stems = stems.into_iter().flat_map(extend).collect();
    }
    stems
        .into_par_iter()
        .flat_map_iter(|stem| {
            let mut level = vec![stem];
            while level.first().is_some_and(|s| s.0.len() < len) {
                level = level.into_iter().flat_map(extend).collect();
            }
            level
        })
        .collect()
}
