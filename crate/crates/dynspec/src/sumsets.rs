//! Sums, differences and polynomial images of pairs of Cantor sets.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive};
use rayon::prelude::*;
use serde::Serialize;

use crate::cantor::presentation::DEFAULT_BITS;
use crate::cantor::{build_cover, thickness_of_cover, BranchMap, CantorPresentation, Cell, CoverCell, CylinderCover, IntervalUnion, Thickness};
use crate::error::{Error, Result};
use crate::numeric::rational::int;
use crate::numeric::surd::rat_decimal;
use crate::numeric::{Poly2, QuadSurd, Rat, RatInterval};

/// Fixed-point scale for the fast Minkowski path.
const FIX_BITS: usize = 100;

/// `(2221564096 + 283748 sqrt(462)) / 491993569`, where Hall's ray begins.
pub fn freiman_constant() -> QuadSurd {
    let d = int(491993569);
    QuadSurd::new(int(2221564096) / &d, int(283748) / &d, BigInt::from(462))
}

#[derive(Clone, Debug, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum CoverKind {
    /// Merged images of all pairs of depth-`n` cylinders; `witnesses[i]` is a pair
    /// of cylinder words contributing to the left end of component `i`.
    Explicit { witnesses: Vec<(Vec<usize>, Vec<usize>)> },
    /// `U_n = ∪_t (r U_{n-1} + t)` over `translations`, starting from the explicit
    /// cover at `base_depth`; only the measure bound is materialized.
    SelfSimilar { base_depth: usize, ratio: Rat, translations: Vec<Rat> },
}

#[derive(Clone, Debug, Serialize)]
pub struct SumCover {
    pub depth: usize,
    pub map: String,
    /// The explicit union; for self-similar covers, the one at `base_depth`.
    pub union: IntervalUnion,
    pub kind: CoverKind,
}

impl SumCover {
    pub fn is_explicit(&self) -> bool {
        matches!(self.kind, CoverKind::Explicit { .. })
    }
}

/// Upper bound on the Lebesgue measure of the covered set.
pub fn measure_upper_bound(cover: &SumCover) -> Rat {
    match &cover.kind {
        CoverKind::Explicit { .. } => cover.union.length(),
        CoverKind::SelfSimilar { base_depth, ratio, translations } => {
            let q = ratio * int(translations.len() as i64);
            let steps = cover.depth - base_depth;
            (0..steps).fold(cover.union.length(), |acc, _| acc * &q)
        }
    }
}

fn to_fix_floor(x: &Rat) -> i128 {
    let n: BigInt = x.numer() << FIX_BITS;
    Integer::div_floor(&n, x.denom()).to_i128().expect("cover endpoint in fixed-point range")
}

fn to_fix_ceil(x: &Rat) -> i128 {
    let n: BigInt = x.numer() << FIX_BITS;
    Integer::div_ceil(&n, x.denom()).to_i128().expect("cover endpoint in fixed-point range")
}

fn from_fix(v: i128) -> Rat {
    Rat::new(BigInt::from(v), BigInt::one() << FIX_BITS)
}

/// Merges `(lo, hi, pair)` triples, keeping the pair behind each component's left end.
fn merge<T: Ord + Clone + Send>(mut v: Vec<(T, T, u32, u32)>) -> Vec<(T, T, u32, u32)> {
    v.par_sort_unstable();
    let mut out: Vec<(T, T, u32, u32)> = Vec::new();
    for iv in v {
        match out.last_mut() {
            Some(last) if iv.0 <= last.1 => {
                if iv.1 > last.1 {
                    last.1 = iv.1;
                }
            }
            _ => out.push(iv),
        }
    }
    out
}

/// Cover of `f(K × K')` from all pairs of depth-`n` cylinders.
pub fn image_cover(f: &Poly2, k: &CantorPresentation, k2: &CantorPresentation, depth: usize) -> SumCover {
    let a = build_cover(k, depth);
    let b = build_cover(k2, depth);
    image_of_covers(f, &a, &b)
}

pub fn image_of_covers(f: &Poly2, a: &CylinderCover, b: &CylinderCover) -> SumCover {
    image_of_covers_with(f, a, b, true)
}

/// `fixed_point`: linear maps with moderate values go through 100-bit
/// fixed-point arithmetic with outward rounding instead of exact rationals.
fn image_of_covers_with(f: &Poly2, a: &CylinderCover, b: &CylinderCover, fixed_point: bool) -> SumCover {
    let na = a.cells.len() as u32;
    let nb = b.cells.len() as u32;
    let pairs = (0..na).into_par_iter().flat_map_iter(|i| (0..nb).map(move |j| (i, j)));
    let bound = Rat::from_integer(BigInt::one() << 20);
    let small = |cells: &CylinderCover, p: &Rat| {
        cells.cells.iter().all(|c| (&c.cell.outer.lo * p).abs() < bound && (&c.cell.outer.hi * p).abs() < bound)
    };
    let linear = f.as_linear().filter(|(p, q, _)| fixed_point && small(a, p) && small(b, q));
    let (parts, witness) = if let Some((p, q, c)) = linear {
        let fix = |cells: &CylinderCover, m: &Rat| -> Vec<(i128, i128)> {
            cells
                .cells
                .iter()
                .map(|c| {
                    let iv = c.cell.outer.scale(m);
                    (to_fix_floor(&iv.lo), to_fix_ceil(&iv.hi))
                })
                .collect()
        };
        let (fa, fb) = (fix(a, &p), fix(b, &q));
        let raw: Vec<(i128, i128, u32, u32)> = pairs
            .map(|(i, j)| {
                let (l1, h1) = fa[i as usize];
                let (l2, h2) = fb[j as usize];
                (l1 + l2, h1 + h2, i, j)
            })
            .collect();
        let merged = merge(raw);
        let parts: Vec<RatInterval> =
            merged.iter().map(|m| RatInterval::new(from_fix(m.0) + &c, from_fix(m.1) + &c)).collect();
        (parts, merged.iter().map(|m| (m.2, m.3)).collect::<Vec<_>>())
    } else {
        let raw: Vec<(Rat, Rat, u32, u32)> = pairs
            .map(|(i, j)| {
                let r = f.range(&a.cells[i as usize].cell.outer, &b.cells[j as usize].cell.outer);
                (r.lo, r.hi, i, j)
            })
            .collect();
        let merged = merge(raw);
        let witness = merged.iter().map(|m| (m.2, m.3)).collect();
        (merged.into_iter().map(|m| RatInterval::new(m.0, m.1)).collect(), witness)
    };
    let witnesses = witness
        .into_iter()
        .map(|(i, j)| (a.cells[i as usize].word.clone(), b.cells[j as usize].word.clone()))
        .collect();
    SumCover { depth: a.depth, map: f.to_string(), union: IntervalUnion::from_intervals(parts), kind: CoverKind::Explicit { witnesses } }
}

/// Cover of `K + K'`; the same as `image_cover` with `x + y`.
pub fn sum_cover(k: &CantorPresentation, k2: &CantorPresentation, depth: usize) -> SumCover {
    image_cover(&Poly2::parse("x + y").unwrap(), k, k2, depth)
}

/// `K = ∪_a (r K + t_a)` for a full-shift affine presentation whose branches have a
/// common contraction `r` and do not depend on the source letter. Reversing branches
/// need `K` symmetric, which holds when reflection permutes the branch maps up to
/// composition with the reflection itself.
fn similarity(k: &CantorPresentation) -> Option<(Rat, Vec<Rat>)> {
    let n = k.size();
    if k.matrix() != &crate::symbolic::TransitionMatrix::full(n) {
        return None;
    }
    let hull = k.hull();
    let (h0, h1) = hull.exact.as_ref().map(|(a, b)| (a.clone(), b.clone()))?;
    if !h0.is_rational() || !h1.is_rational() {
        return None;
    }
    let s = h0.a.clone() + h1.a.clone();
    let form = |m: &BranchMap| match m {
        BranchMap::Mobius(m) if m.is_affine() => Some((&m.a / &m.d, &m.b / &m.d)),
        _ => None,
    };
    // x -> p x + q per letter, required to be the same for every source letter
    let maps: Vec<(Rat, Rat)> = (0..n)
        .map(|a| {
            let f = form(k.branch(a, 0)?)?;
            (1..n).all(|b| k.branch(a, b).and_then(form).as_ref() == Some(&f)).then_some(f)
        })
        .collect::<Option<_>>()?;
    let r = maps[0].0.abs();
    if maps.iter().any(|(p, _)| p.abs() != r) {
        return None;
    }
    if maps.iter().any(|(p, _)| p.is_negative()) {
        // R(x) = s - x must send each R∘f to some g or g∘R
        let closed = maps.iter().all(|(p, q)| {
            let rf = (-p, &s - q);
            maps.iter().any(|(pg, qg)| rf == (pg.clone(), qg.clone()) || rf == (-pg, pg * &s + qg))
        });
        if !closed {
            return None;
        }
    }
    let t = maps.iter().map(|(p, q)| if p.is_positive() { q.clone() } else { q - &r * &s }).collect();
    Some((r, t))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum SumOp {
    Plus,
    Minus,
}

impl SumOp {
    pub fn poly(self) -> Poly2 {
        Poly2::parse(match self {
            SumOp::Plus => "x + y",
            SumOp::Minus => "x - y",
        })
        .unwrap()
    }
}

/// Depth-`n` cover of `K ± K'` for homogeneous self-similar sets, materialized at
/// `base_depth` and propagated through the similarity structure.
pub fn self_similar_cover(
    k: &CantorPresentation,
    k2: &CantorPresentation,
    op: SumOp,
    base_depth: usize,
    depth: usize,
) -> Result<SumCover> {
    let not = || Error::Input(format!("{} and {} are not homogeneous self-similar with a common ratio", k.name, k2.name));
    let (r, t) = similarity(k).ok_or_else(not)?;
    let (r2, t2) = similarity(k2).ok_or_else(not)?;
    if r != r2 {
        return Err(not());
    }
    if depth < base_depth {
        return Err(Error::Input("depth below base depth".into()));
    }
    let mut trans: Vec<Rat> = t
        .iter()
        .flat_map(|a| t2.iter().map(move |b| if op == SumOp::Plus { a + b } else { a - b }))
        .collect();
    trans.sort();
    trans.dedup();
    let base = image_cover(&op.poly(), k, k2, base_depth);
    Ok(SumCover {
        depth,
        map: base.map,
        union: base.union,
        kind: CoverKind::SelfSimilar { base_depth, ratio: r, translations: trans },
    })
}

#[derive(Clone, Debug, Serialize)]
pub struct ThicknessData {
    pub depth: usize,
    pub left: String,
    pub right: String,
    pub product_at_least_one: bool,
}

#[derive(Clone, Debug, Serialize)]
pub struct IntervalCertificate {
    pub lo: String,
    pub hi: String,
    pub lo_decimal: String,
    pub hi_decimal: String,
    pub method: &'static str,
    pub depth: usize,
    /// Finite-stage thickness at `depth` and `depth - 1`.
    pub thickness: Vec<ThicknessData>,
    /// Gaps long enough to hold the other set, whose excluded translations were checked.
    pub excluded_ranges: Vec<(String, String)>,
    pub max_cell_lengths: (String, String),
    pub hull_lengths: (String, String),
    pub conditional_on: &'static str,
}

#[derive(Clone, Debug, Serialize)]
pub struct Refusal {
    pub reason: &'static str,
    pub detail: String,
}

#[derive(Clone, Debug, Serialize)]
#[serde(tag = "outcome", rename_all = "snake_case")]
pub enum Certification {
    Certified(IntervalCertificate),
    Refused(Refusal),
}

impl Certification {
    pub fn is_certified(&self) -> bool {
        matches!(self, Certification::Certified(_))
    }
}

fn show(t: &Thickness) -> String {
    match t {
        Thickness::Finite(r) => format!("{r} ~ {}", rat_decimal(r)),
        Thickness::Infinite => "infinite".into(),
    }
}

fn product_at_least_one(a: &Thickness, b: &Thickness) -> bool {
    match (a, b) {
        (Thickness::Finite(x), Thickness::Finite(y)) => x * y >= Rat::one(),
        (Thickness::Finite(x), Thickness::Infinite) | (Thickness::Infinite, Thickness::Finite(x)) => x.is_positive(),
        _ => true,
    }
}

/// Translations `t` for which `t - K'` may sit inside a gap of `K` seen in `cover`.
fn excluded(cover: &CylinderCover, other: &crate::cantor::Cell, flip: bool) -> Vec<RatInterval> {
    let span_min = &other.inner.hi - &other.inner.lo;
    let cells: Vec<_> = cover.cells.iter().map(|c| &c.cell).collect();
    cells
        .windows(2)
        .filter_map(|w| {
            let (g0, g1) = (&w[0].inner.hi, &w[1].inner.lo);
            if g1 - g0 <= span_min {
                return None;
            }
            Some(if flip {
                // K inside a gap of t - K': t in (h1 + g0', h0 + g1')
                RatInterval::new(&other.inner.hi + g0, &other.inner.lo + g1)
            } else {
                RatInterval::new(g0 + &other.inner.hi, g1 + &other.inner.lo)
            })
        })
        .collect()
}

/// Certifies `[lo, hi] ⊆ K + K'` by the gap lemma: for each `t` the sets `K` and
/// `t - K'` are linked, and their thicknesses multiply to at least 1.
pub fn certify_interval(
    k: &CantorPresentation,
    k2: &CantorPresentation,
    lo: &QuadSurd,
    hi: &QuadSurd,
    depth: usize,
) -> Certification {
    if depth < 2 {
        return refuse("depth", "need depth >= 2 to compare two consecutive stages".into());
    }
    let a = [build_cover(k, depth), build_cover(k, depth - 1)];
    let b = [build_cover(k2, depth), build_cover(k2, depth - 1)];
    certify_with_hulls(&a, &b, (k.hull(), k2.hull()), lo, hi, depth)
}

/// The hull of the cells of a cover.
pub fn cover_hull(cover: &CylinderCover) -> Cell {
    let first = &cover.cells.first().expect("nonempty cover").cell;
    let last = &cover.cells.last().unwrap().cell;
    let lo = cover.cells.iter().map(|c| &c.cell.outer.lo).min().unwrap().clone();
    let hi = cover.cells.iter().map(|c| &c.cell.outer.hi).max().unwrap().clone();
    Cell { outer: RatInterval::new(lo, hi), inner: RatInterval::new(first.inner.lo.clone(), last.inner.hi.clone()), exact: None }
}

/// Same test as [`certify_interval`] on explicit covers of two sets at consecutive depths
/// (`a[0]` at depth `depth`, `a[1]` at `depth - 1`), taking the hulls from the coarser covers.
pub fn certify_covers(a: &[CylinderCover; 2], b: &[CylinderCover; 2], lo: &QuadSurd, hi: &QuadSurd, depth: usize) -> Certification {
    if a.iter().chain(b).any(|c| c.is_empty()) {
        return refuse("input", "empty cover".into());
    }
    certify_with_hulls(a, b, (cover_hull(&a[1]), cover_hull(&b[1])), lo, hi, depth)
}

/// The cover reflected through 0.
pub fn negate_cover(cover: &CylinderCover) -> CylinderCover {
    let neg = crate::cantor::Composite::Exact(crate::numeric::Mobius::affine(-Rat::one(), int(0)));
    let cells = cover.cells.iter().map(|c| CoverCell { word: c.word.clone(), cell: c.cell.image(&neg, DEFAULT_BITS) }).collect();
    CylinderCover::from_cells(cover.depth, cells)
}

/// Covers at `depth` and `depth - 1` of the two operands of `K op K'`, the second reflected for a difference.
pub fn operand_covers(k: &CantorPresentation, k2: &CantorPresentation, op: SumOp, depth: usize) -> ([CylinderCover; 2], [CylinderCover; 2]) {
    let a = [build_cover(k, depth), build_cover(k, depth - 1)];
    let b = [build_cover(k2, depth), build_cover(k2, depth - 1)];
    match op {
        SumOp::Plus => (a, b),
        SumOp::Minus => (a, [negate_cover(&b[0]), negate_cover(&b[1])]),
    }
}

/// `[lo, hi] ⊆ K op K'` by the gap lemma on the operand covers.
pub fn certify_op(k: &CantorPresentation, k2: &CantorPresentation, op: SumOp, lo: &QuadSurd, hi: &QuadSurd, depth: usize) -> Certification {
    if depth < 2 {
        return refuse("depth", "need depth >= 2 to compare two consecutive stages".into());
    }
    match op {
        SumOp::Plus => certify_interval(k, k2, lo, hi, depth),
        SumOp::Minus => {
            let (a, b) = operand_covers(k, k2, op, depth);
            certify_covers(&a, &b, lo, hi, depth)
        }
    }
}

/// Hull of `K op K'` read from the depth-1 covers, trimmed by `margin` of its length at each end.
pub fn auto_interval_op(k: &CantorPresentation, k2: &CantorPresentation, op: SumOp, margin: &Rat) -> Option<(QuadSurd, QuadSurd)> {
    match op {
        SumOp::Plus => auto_interval(k, k2, margin),
        SumOp::Minus => {
            let (a, b) = operand_covers(k, k2, op, 2);
            let (ha, hb) = (cover_hull(&a[1]), cover_hull(&b[1]));
            let lo = &ha.outer.lo + &hb.outer.lo;
            let hi = &ha.inner.hi + &hb.inner.hi;
            let d = (&hi - &lo) * margin;
            Some((QuadSurd::rational(&lo + &d), QuadSurd::rational(&hi - &d)))
        }
    }
}

fn refuse(reason: &'static str, detail: String) -> Certification {
    Certification::Refused(Refusal { reason, detail })
}

fn certify_with_hulls(
    a: &[CylinderCover; 2],
    b: &[CylinderCover; 2],
    (h, h2): (Cell, Cell),
    lo: &QuadSurd,
    hi: &QuadSurd,
    depth: usize,
) -> Certification {
    if depth < 2 {
        return refuse("depth", "need depth >= 2 to compare two consecutive stages".into());
    }
    let c = lo.enclose(128);
    let d = hi.enclose(128);
    if c.lo > d.hi {
        return refuse("input", "empty interval".into());
    }
    let mut tdata = Vec::new();
    for (i, n) in [depth, depth - 1].into_iter().enumerate() {
        let (ta, tb) = (thickness_of_cover(&a[i]), thickness_of_cover(&b[i]));
        let ok = product_at_least_one(&ta, &tb);
        tdata.push(ThicknessData { depth: n, left: show(&ta), right: show(&tb), product_at_least_one: ok });
        if !ok {
            return refuse("thickness", format!("finite-stage thickness product below 1 at depth {n}: {} * {}", show(&ta), show(&tb)));
        }
    }
    let lo_ok = &h.outer.lo + &h2.outer.lo;
    let hi_ok = &h.inner.hi + &h2.inner.hi;
    if c.lo < lo_ok || d.hi > hi_ok {
        return refuse("linking", format!("interval leaves the hull sum [{}, {}]", rat_decimal(&lo_ok), rat_decimal(&hi_ok)));
    }
    let (ca, cb) = (&a[0], &b[0]);
    let (la, lb) = (&h.inner.hi - &h.inner.lo, &h2.inner.hi - &h2.inner.lo);
    let (ma, mb) = (ca.max_cell_length(), cb.max_cell_length());
    if ma >= lb || mb >= la {
        return refuse("cell-size", "depth too small: a cylinder is as long as the other set's hull".into());
    }
    let target = RatInterval::new(c.lo.clone(), d.hi.clone());
    let mut ex = excluded(ca, &h2, false);
    ex.extend(excluded(cb, &h, true));
    if let Some(bad) = ex.iter().find(|e| e.lo <= target.hi && target.lo <= e.hi) {
        return refuse(
            "linking",
            format!("translations in ({}, {}) may place one set inside a gap of the other", rat_decimal(&bad.lo), rat_decimal(&bad.hi)),
        );
    }
    Certification::Certified(IntervalCertificate {
        lo: lo.to_string(),
        hi: hi.to_string(),
        lo_decimal: rat_decimal(&c.lo),
        hi_decimal: rat_decimal(&d.hi),
        method: "thickness-linked-pair",
        depth,
        thickness: tdata,
        excluded_ranges: ex.iter().map(|e| (rat_decimal(&e.lo), rat_decimal(&e.hi))).collect(),
        max_cell_lengths: (rat_decimal(&ma), rat_decimal(&mb)),
        hull_lengths: (rat_decimal(&la), rat_decimal(&lb)),
        conditional_on: "finite-stage gap structure at two consecutive depths standing in for the limit set",
    })
}

/// `[c + δ, d - δ]` for the hull sum `[c, d]`, with `δ` the given fraction of its length.
pub fn auto_interval(k: &CantorPresentation, k2: &CantorPresentation, margin: &Rat) -> Option<(QuadSurd, QuadSurd)> {
    let (a0, a1) = k.hull().exact?;
    let (b0, b1) = k2.hull().exact?;
    let c = a0.add(&b0);
    let d = a1.add(&b1);
    let len = d.sub(&c).enclose(64).lo;
    let delta = len * margin;
    Some((c.add_rat(&delta), d.add_rat(&-delta)))
}

/// Whether `[lo, hi]` lies in a single component of the cover.
pub fn cover_contains(cover: &SumCover, lo: &QuadSurd, hi: &QuadSurd) -> bool {
    let iv = RatInterval::new(lo.enclose(128).lo, hi.enclose(128).hi);
    cover.is_explicit() && cover.union.covers(&iv)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numeric::parse_surd;
    use crate::numeric::rational::rat;

    fn third() -> CantorPresentation {
        CantorPresentation::k_alpha(rat(1, 3)).unwrap()
    }

    #[test]
    fn middle_third_difference_is_certified() {
        let k = third();
        let (lo, hi) = auto_interval_op(&k, &k, SumOp::Minus, &rat(1, 100)).unwrap();
        assert_eq!(lo, QuadSurd::rational(rat(-49, 50)));
        let c = certify_op(&k, &k, SumOp::Minus, &lo, &hi, 4);
        assert!(c.is_certified(), "{c:?}");
        let thin = CantorPresentation::k_alpha(rat(2, 5)).unwrap();
        let (lo, hi) = auto_interval_op(&thin, &thin, SumOp::Minus, &rat(1, 100)).unwrap();
        match certify_op(&thin, &thin, SumOp::Minus, &lo, &hi, 4) {
            Certification::Refused(r) => assert_eq!(r.reason, "thickness"),
            c => panic!("{c:?}"),
        }
    }

    #[test]
    fn middle_third_sums_and_differences() {
        let k = third();
        let s = sum_cover(&k, &k, 3);
        assert_eq!(s.union.parts(), &[RatInterval::new(int(0), int(2))]);
        let d = image_cover(&SumOp::Minus.poly(), &k, &k, 3);
        assert_eq!(d.union.parts(), &[RatInterval::new(int(-1), int(1))]);
        let w = image_cover(&Poly2::parse("x + 2*y").unwrap(), &k, &k, 4);
        assert_eq!(w.union.parts(), &[RatInterval::new(int(0), int(3))]);
    }

    #[test]
    fn fixed_point_path_agrees_with_exact_path() {
        let k = CantorPresentation::k_alpha(rat(2, 5)).unwrap();
        let (a, b) = (build_cover(&k, 4), build_cover(&k, 4));
        for f in ["x + y", "x - 2*y + 1/3", "x + 0*y"] {
            let f = Poly2::parse(f).unwrap();
            let fast = image_of_covers_with(&f, &a, &b, true).union;
            let exact = image_of_covers_with(&f, &a, &b, false).union;
            assert_eq!(fast.len(), exact.len(), "{f}");
            let slack = crate::numeric::rational::pow2(-90);
            for (u, v) in fast.parts().iter().zip(exact.parts()) {
                assert!(u.contains_interval(v), "{f}");
                assert!(&u.width() - &v.width() < slack, "{f}");
            }
        }
        let id = image_of_covers_with(&Poly2::x(), &a, &b, false).union;
        assert_eq!(id, a.union());
    }

    #[test]
    fn k04_difference_decays() {
        let k = CantorPresentation::k_alpha(rat(2, 5)).unwrap();
        let oracle = |n: i32| 2.0 * 0.9f64.powi(n);
        for n in 1..=8 {
            let m = measure_upper_bound(&image_cover(&SumOp::Minus.poly(), &k, &k, n as usize));
            assert!(crate::numeric::rational::to_f64(&m) <= oracle(n) * (1.0 + 1e-9), "depth {n}");
        }
        let ss = self_similar_cover(&k, &k, SumOp::Minus, 6, 20).unwrap();
        match &ss.kind {
            CoverKind::SelfSimilar { ratio, translations, .. } => {
                assert_eq!(*ratio, rat(3, 10));
                assert_eq!(translations, &vec![rat(-7, 10), int(0), rat(7, 10)]);
            }
            _ => panic!(),
        }
        assert!(crate::numeric::rational::to_f64(&measure_upper_bound(&ss)) <= oracle(20) * (1.0 + 1e-9));
    }

    #[test]
    fn hall_interval_is_certified() {
        let k = CantorPresentation::continued_fraction(4).unwrap();
        let (lo, hi) = auto_interval(&k, &k, &rat(1, 1000)).unwrap();
        let exact = parse_surd("sqrt(2) - 1").unwrap();
        assert!(lo > exact && lo.sub(&exact).to_f64() < 2e-3);
        let cert = certify_interval(&k, &k, &lo, &hi, 4);
        assert!(cert.is_certified(), "{cert:?}");
        assert!(cover_contains(&sum_cover(&k, &k, 4), &lo, &hi));
    }

    #[test]
    fn thin_sets_are_refused() {
        let k = CantorPresentation::k_alpha(rat(2, 5)).unwrap();
        let one = QuadSurd::rational(int(1));
        match certify_interval(&k, &k, &one, &one, 3) {
            Certification::Refused(r) => assert_eq!(r.reason, "thickness"),
            c => panic!("{c:?}"),
        }
        let t = third();
        assert!(certify_interval(&t, &t, &one, &one, 3).is_certified());
        let half = QuadSurd::rational(rat(1, 2));
        assert!(certify_interval(&t, &t, &half, &one, 3).is_certified());
    }

    #[test]
    fn freiman_value() {
        assert!((freiman_constant().to_f64() - 4.527829566).abs() < 1e-8);
    }
}
