use std::sync::Arc;

use num_traits::{Signed, Zero};
use rayon::prelude::*;
use serde::Serialize;
use serde_json::{json, Value};

use super::model::{coding_point, ProductHorseshoe};
use crate::cantor::{cylinder, CantorPresentation};
use crate::numeric::{Poly2, Rat, RatInterval};
use crate::spectra::SequenceObservable;
use crate::symbolic::{SymbolicSequence, TransitionMatrix};

/// `F = f ∘ Π` for a polynomial `f` on the chart.
#[derive(Clone, Debug)]
pub struct GeometricPullback {
    pub horseshoe: Arc<ProductHorseshoe>,
    pub f: Poly2,
}

impl GeometricPullback {
    pub fn new(horseshoe: Arc<ProductHorseshoe>, f: Poly2) -> Self {
        Self { horseshoe, f }
    }

    /// Enclosures of `∂f/∂x` and `∂f/∂y` on a box.
    pub fn gradient(&self, bx: &RatInterval, by: &RatInterval) -> (RatInterval, RatInterval) {
        (self.f.dx().range(bx, by), self.f.dy().range(bx, by))
    }

    fn chart_box(&self) -> (RatInterval, RatInterval) {
        let (s, u) = self.horseshoe.chart();
        (s.outer, u.outer)
    }
}

fn sign_definite(r: &RatInterval) -> bool {
    !r.lo.is_negative() || !r.hi.is_positive()
}

impl SequenceObservable for GeometricPullback {
    fn eval_exact(&self, x: &SymbolicSequence) -> Rat {
        let (a, b) = self.horseshoe.conjugacy_exact(x).expect("admissible sequence");
        self.f.eval(&a, &b)
    }

    fn eval_window(&self, window: &[usize]) -> RatInterval {
        let (bx, by) = self.horseshoe.window_box(window);
        self.f.range(&bx, &by)
    }

    fn monotone(&self) -> bool {
        let (bx, by) = self.chart_box();
        let (gx, gy) = self.gradient(&bx, &by);
        sign_definite(&gx) && sign_definite(&gy)
    }

    fn matrix(&self) -> &TransitionMatrix {
        self.horseshoe.matrix()
    }

    fn describe(&self) -> Value {
        json!({
            "type": "geometric",
            "f": self.f.to_string(),
            "stable": self.horseshoe.stable.name,
            "unstable": self.horseshoe.unstable.name,
        })
    }

    fn modulus(&self, n: usize) -> Option<Rat> {
        let (bx, by) = self.chart_box();
        let (gx, gy) = self.gradient(&bx, &by);
        let lip = gx.abs().hi + gy.abs().hi;
        let diam = if bx.width() > by.width() { bx.width() } else { by.width() };
        Some(lip * diam * self.horseshoe.contraction().pow(n as i32))
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Verdict {
    Pass,
    Fail,
    Unknown,
}

/// A cylinder box `I^s(past) × I^u(future)`, `past[0] = future[0]`.
#[derive(Clone, Debug, Serialize)]
pub struct MaxBox {
    pub past: Vec<usize>,
    pub future: Vec<usize>,
    pub x: RatInterval,
    pub y: RatInterval,
    pub upper: Rat,
}

#[derive(Clone, Debug, Serialize)]
pub struct Witness {
    pub sequence: SymbolicSequence,
    pub point: (Rat, Rat),
    pub value: Rat,
}

#[derive(Clone, Debug, Serialize)]
pub struct HPhiReport {
    pub verdict: Verdict,
    pub reason: String,
    pub level: usize,
    pub survivors: Vec<MaxBox>,
    pub best: Option<Witness>,
    pub upper: Option<Rat>,
    pub grad_x: Option<RatInterval>,
    pub grad_y: Option<RatInterval>,
}

impl HPhiReport {
    pub fn passed(&self) -> bool {
        self.verdict == Verdict::Pass
    }

    /// The maximizer's central block `x_{-(L-1)} … x_{L-1}` for the surviving box.
    pub fn max_window(&self) -> Option<Vec<usize>> {
        let b = self.survivors.first()?;
        let mut w: Vec<usize> = b.past.iter().rev().copied().collect();
        w.extend_from_slice(&b.future[1..]);
        Some(w)
    }
}

/// Eventually periodic one-sided continuations of `word` in `m`.
fn continuations(m: &TransitionMatrix, word: &[usize]) -> Vec<(Vec<usize>, Vec<usize>)> {
    let last = *word.last().unwrap();
    let mut out = Vec::new();
    for c in 0..m.size() {
        if !m.allowed(c, c) {
            continue;
        }
        if let Ok(conn) = m.connecting_word(last, c) {
            let mut seg = word.to_vec();
            seg.extend(conn);
            if c == last {
                out.push((seg, vec![c]));
            } else {
                seg.push(c);
                out.push((seg, vec![c]));
            }
        }
    }
    if let Ok(conn) = m.connecting_word(last, last) {
        let mut per = conn;
        per.push(last);
        out.push((word.to_vec(), per));
    }
    out
}

/// One-sided coding point, exact for affine presentations.
fn one_sided(k: &CantorPresentation, seg: &[usize], per: &[usize]) -> Rat {
    coding_point(k, seg, per)
}

fn two_sided(past: &(Vec<usize>, Vec<usize>), fut: &(Vec<usize>, Vec<usize>)) -> SymbolicSequence {
    // past = (θ_0, θ_{-1}, …) as segment + period; fut = (θ_0, θ_1, …)
    let left: Vec<usize> = past.1.iter().rev().copied().collect();
    let mut core: Vec<usize> = past.0[1..].iter().rev().copied().collect();
    let offset = core.len();
    core.extend_from_slice(&fut.0);
    let right = fut.1.clone();
    SymbolicSequence::new(left, core, right, offset as i64).expect("nonempty periods")
}

fn best_witness(h: &ProductHorseshoe, f: &Poly2, past: &[usize], fut: &[usize]) -> Witness {
    let mut best: Option<Witness> = None;
    for p in continuations(h.stable.matrix(), past) {
        let x = one_sided(&h.stable, &p.0, &p.1);
        for q in continuations(h.unstable.matrix(), fut) {
            let y = one_sided(&h.unstable, &q.0, &q.1);
            let v = f.eval(&x, &y);
            if best.as_ref().map_or(true, |b| v > b.value) {
                best = Some(Witness { sequence: two_sided(&p, &q), point: (x.clone(), y), value: v });
            }
        }
    }
    best.expect("every letter has a continuation")
}

fn make_box(h: &ProductHorseshoe, f: &Poly2, past: Vec<usize>, future: Vec<usize>) -> MaxBox {
    let x = cylinder(&h.stable, &past).outer;
    let y = cylinder(&h.unstable, &future).outer;
    let upper = f.range(&x, &y).hi;
    MaxBox { past, future, x, y, upper }
}

/// Branch and bound for `M_f(Λ)`: refines paired cylinder boxes up to `depth`, holding
/// at most `resolution` boxes per level.
pub fn check_h_phi(f: &Poly2, h: &ProductHorseshoe, depth: usize, resolution: usize) -> HPhiReport {
    let (fx, fy) = (f.dx(), f.dy());
    let report = |verdict, reason: &str, level, survivors: Vec<MaxBox>, best: Option<Witness>| {
        let upper = survivors.iter().map(|b| b.upper.clone()).max();
        let (gx, gy) = match survivors.as_slice() {
            [b] => (Some(fx.range(&b.x, &b.y)), Some(fy.range(&b.x, &b.y))),
            _ => (None, None),
        };
        HPhiReport { verdict, reason: reason.into(), level, survivors, best, upper, grad_x: gx, grad_y: gy }
    };
    if fx.is_zero() || fy.is_zero() {
        let axis = if fx.is_zero() { "x" } else { "y" };
        return report(Verdict::Fail, &format!("partial derivative in {axis} vanishes identically"), 0, vec![], None);
    }
    let n = h.matrix().size();
    let mut boxes: Vec<MaxBox> = (0..n).map(|a| make_box(h, f, vec![a], vec![a])).collect();
    let mut best: Option<Witness> = None;
    for level in 1..=depth.max(1) {
        if level > 1 {
            let ms = h.stable.matrix();
            let mu = h.unstable.matrix();
            boxes = boxes
                .par_iter()
                .flat_map_iter(|b| {
                    let sp: Vec<usize> = ms.successors(*b.past.last().unwrap()).collect();
                    let su: Vec<usize> = mu.successors(*b.future.last().unwrap()).collect();
                    let mut kids = Vec::new();
                    for &s in &sp {
                        for &u in &su {
                            let mut p = b.past.clone();
                            p.push(s);
                            let mut q = b.future.clone();
                            q.push(u);
                            kids.push(make_box(h, f, p, q));
                        }
                    }
                    kids
                })
                .collect();
        }
        let ws: Vec<Witness> = boxes.par_iter().map(|b| best_witness(h, f, &b.past, &b.future)).collect();
        for w in ws {
            if best.as_ref().map_or(true, |b| w.value > b.value) {
                best = Some(w);
            }
        }
        let lower = best.as_ref().unwrap().value.clone();
        boxes.retain(|b| b.upper >= lower);
        boxes.sort_by(|a, b| b.upper.cmp(&a.upper).then_with(|| (&a.past, &a.future).cmp(&(&b.past, &b.future))));
        let top = boxes[0].upper.clone();
        let w = best.as_ref().unwrap();
        if w.value == top {
            let (x, y) = &w.point;
            if fx.eval(x, y).is_zero() || fy.eval(x, y).is_zero() {
                return report(Verdict::Fail, "gradient component vanishes at the maximizer", level, boxes, best);
            }
        }
        if boxes.len() == 1 {
            let b = &boxes[0];
            if fx.range(&b.x, &b.y).excludes_zero() && fy.range(&b.x, &b.y).excludes_zero() {
                return report(Verdict::Pass, "unique maximizer box with non-vanishing partials", level, boxes, best);
            }
        }
        if boxes.len() > resolution {
            return report(Verdict::Unknown, "box budget exceeded", level, boxes, best);
        }
    }
    report(Verdict::Unknown, "depth exhausted before isolating the maximizer", depth, boxes, best)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numeric::rational::{int, rat};
    use crate::spectra::{markov_value, ShiftObservable};

    fn third() -> Arc<ProductHorseshoe> {
        Arc::new(ProductHorseshoe::symmetric(CantorPresentation::k_alpha(rat(1, 3)).unwrap()).unwrap())
    }

    #[test]
    fn sum_passes_at_the_corner() {
        let r = check_h_phi(&Poly2::parse("x + y").unwrap(), &third(), 6, 64);
        assert_eq!(r.verdict, Verdict::Pass);
        assert_eq!(r.best.unwrap().point, (int(1), int(1)));
    }

    #[test]
    fn degenerate_observables_fail() {
        let r = check_h_phi(&Poly2::parse("x").unwrap(), &third(), 6, 64);
        assert_eq!(r.verdict, Verdict::Fail);
        let r = check_h_phi(&Poly2::parse("-(x-1)^2 - (y-1)^2").unwrap(), &third(), 6, 64);
        assert_eq!(r.verdict, Verdict::Fail);
        assert!(r.reason.contains("gradient"));
    }

    #[test]
    fn too_shallow_is_unknown() {
        let f = Poly2::parse("x + y - 3(x - 1/2)^2").unwrap();
        let r = check_h_phi(&f, &third(), 1, 64);
        assert_ne!(r.verdict, Verdict::Fail);
    }

    #[test]
    fn windows_enclose_exact_values() {
        let g = GeometricPullback::new(third(), Poly2::parse("x + 2y - x y").unwrap());
        let theta = SymbolicSequence::new(vec![1, 0], vec![0, 1, 1, 0], vec![1], 2).unwrap();
        let v = g.eval_exact(&theta);
        for r in 0..6i64 {
            let w = theta.window(-r, r);
            let iv = g.eval_window(&w);
            assert!(iv.contains(&v));
            assert!(iv.width() <= g.modulus(r as usize).unwrap());
        }
    }

    #[test]
    fn markov_value_through_the_pullback() {
        let g = ShiftObservable::Geometric(Arc::new(GeometricPullback::new(third(), Poly2::parse("x + y").unwrap())));
        let theta = SymbolicSequence::new(vec![0], vec![1], vec![0], 0).unwrap();
        assert_eq!(markov_value(&g, &theta).unwrap().value.to_string(), "2");
    }
}
