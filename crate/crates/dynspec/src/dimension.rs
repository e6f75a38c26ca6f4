//! Hausdorff and box dimension bounds from derivative bounds on Markov cylinders.
//!
//! For depth-`n` cylinders `R` with `λ_R ≤ |(g^n)'| ≤ Λ_R` on `R ∩ K`, the roots of
//! `Σ Λ_R^{-α} = C` and `Σ λ_R^{-β} = 1` satisfy `α ≤ HD(K) ≤ d(K) ≤ β` (for `C = 1`).

use num_traits::{One, Signed, Zero};
use rayon::prelude::*;
use serde::Serialize;

use crate::cantor::cover::word_maps;
use crate::cantor::CantorPresentation;
use crate::error::{Error, Result};
use crate::numeric::rational::{self, ln};
use crate::numeric::Rat;
use crate::symbolic::{admissible_words, higher_block, TransitionMatrix};

pub const DEFAULT_TOL: f64 = 1e-12;

#[derive(Clone, Debug, Serialize)]
pub struct CylinderStat {
    pub word: Vec<usize>,
    /// Lower bound for `|(g^n)'|` on the cylinder.
    #[serde(serialize_with = "ser_rat")]
    pub lower: Rat,
    /// Upper bound for `|(g^n)'|` on the cylinder.
    #[serde(serialize_with = "ser_rat")]
    pub upper: Rat,
}

#[derive(Clone, Debug, Serialize)]
pub struct PartitionStats {
    pub depth: usize,
    pub cylinders: Vec<CylinderStat>,
    /// Distortion: `upper ≤ a · lower` on every cylinder.
    #[serde(serialize_with = "ser_rat")]
    pub a: Rat,
    /// Lower bound for `|g'|`.
    #[serde(serialize_with = "ser_rat")]
    pub lambda: Rat,
    /// `max_R lower_R`.
    #[serde(serialize_with = "ser_rat")]
    pub a_n: Rat,
    /// `min_R lower_R`.
    #[serde(serialize_with = "ser_rat")]
    pub b_n: Rat,
    #[serde(skip)]
    pub matrix: TransitionMatrix,
}

fn ser_rat<S: serde::Serializer>(r: &Rat, s: S) -> std::result::Result<S::Ok, S::Error> {
    s.serialize_str(&format!("{} ~ {}", r, rational::to_f64(r)))
}

/// Chain-rule bounds on `|(g^n)'|` over every depth-`n` cylinder.
pub fn derivative_bounds(k: &CantorPresentation, n: usize) -> Result<PartitionStats> {
    if n == 0 {
        return Err(Error::Input("depth must be at least one".into()));
    }
    let contraction = k.max_contraction();
    if contraction >= Rat::one() || contraction.is_zero() {
        return Err(Error::Presentation(format!("branches not uniformly contracting (sup |f'| = {contraction})")));
    }
    let lambda = Rat::one() / contraction;
    let maps = word_maps(k, n + 1, &[]);
    let mut per_word: Vec<(Vec<usize>, Rat, Rat)> = maps
        .into_par_iter()
        .map(|(w, m)| {
            let last = *w.last().unwrap();
            let d = m.derivative_abs(&k.base_cell(last).outer);
            (w[..n].to_vec(), Rat::one() / d.hi, Rat::one() / d.lo)
        })
        .collect();
    per_word.sort_by(|a, b| a.0.cmp(&b.0));
    let mut cylinders: Vec<CylinderStat> = Vec::new();
    for (word, lo, hi) in per_word {
        match cylinders.last_mut() {
            Some(c) if c.word == word => {
                if lo < c.lower {
                    c.lower = lo;
                }
                if hi > c.upper {
                    c.upper = hi;
                }
            }
            _ => cylinders.push(CylinderStat { word, lower: lo, upper: hi }),
        }
    }
    if cylinders.iter().any(|c| c.lower <= Rat::one()) {
        return Err(Error::Presentation("derivative bound not greater than one".into()));
    }
    let a = cylinders.iter().map(|c| &c.upper / &c.lower).max().unwrap();
    let a_n = cylinders.iter().map(|c| c.lower.clone()).max().unwrap();
    let b_n = cylinders.iter().map(|c| c.lower.clone()).min().unwrap();
    Ok(PartitionStats { depth: n, cylinders, a, lambda, a_n, b_n, matrix: k.matrix().clone() })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Weights {
    /// `λ_R`, giving the upper dimension bound.
    Lower,
    /// `Λ_R`, giving the lower dimension bound.
    Upper,
}

/// Bracket `[t_lo, t_hi]` of width at most `tol` around the root of `Σ base^{-t} = c`.
///
/// For a full shift this is the plain sum over cylinders. Otherwise cylinders only
/// concatenate along allowed transitions, and the sum is replaced by the spectral
/// radius of the cylinder transfer matrix `T_t[a][b] = Σ base_R^{-t}` over cylinders
/// `R` beginning with `a` whose last letter may be followed by `b`.
pub fn solve_pressure(stats: &PartitionStats, weights: Weights, c: &Rat, tol: f64) -> Result<(f64, f64)> {
    let logs: Vec<f64> = stats
        .cylinders
        .iter()
        .map(|r| ln(match weights {
            Weights::Lower => &r.lower,
            Weights::Upper => &r.upper,
        }))
        .collect();
    let b = &stats.matrix;
    let full = (0..b.size()).all(|i| (0..b.size()).all(|j| b.allowed(i, j)));
    if full {
        return solve_sum(&logs, c, tol);
    }
    let ends: Vec<(usize, usize)> =
        stats.cylinders.iter().map(|r| (r.word[0], *r.word.last().unwrap())).collect();
    let log_rho = |t: f64| -> f64 {
        let n = b.size();
        let mut m = vec![vec![0.0f64; n]; n];
        for (&(a, z), &l) in ends.iter().zip(&logs) {
            let w = (-t * l).exp();
            for nb in b.successors(z) {
                m[a][nb] += w;
            }
        }
        log_spectral_radius(&m)
    };
    solve_monotone(log_rho, c, tol, logs.iter().cloned().fold(f64::INFINITY, f64::min), logs.len())
}

/// `log ρ(M)` for a nonnegative irreducible matrix, by power iteration on `I + M`
/// stopped once the Collatz–Wielandt bounds `min (Av)_i / v_i <= ρ <= max (Av)_i / v_i` meet.
pub fn log_spectral_radius(m: &[Vec<f64>]) -> f64 {
    let n = m.len();
    let rows: Vec<Vec<(usize, f64)>> =
        m.iter().map(|r| r.iter().enumerate().filter(|(_, &x)| x != 0.0).map(|(j, &x)| (j, x)).collect()).collect();
    let mut v = vec![1.0f64; n];
    let (mut lo, mut hi) = (0.0f64, f64::INFINITY);
    for _ in 0..100_000 {
        let w: Vec<f64> = (0..n).map(|i| v[i] + rows[i].iter().map(|&(j, x)| x * v[j]).sum::<f64>()).collect();
        lo = (0..n).map(|i| w[i] / v[i]).fold(f64::INFINITY, f64::min);
        hi = (0..n).map(|i| w[i] / v[i]).fold(0.0, f64::max);
        let norm = w.iter().cloned().fold(0.0, f64::max);
        v = w.into_iter().map(|x| x / norm).collect();
        if hi - lo <= 1e-14 * hi {
            break;
        }
    }
    (0.5 * (lo + hi) - 1.0).ln()
}

fn solve_monotone(f_log: impl Fn(f64) -> f64, c: &Rat, tol: f64, min_log: f64, count: usize) -> Result<(f64, f64)> {
    if !c.is_positive() {
        return Err(Error::Input("the constant C must be positive".into()));
    }
    let lc = ln(c);
    let at0 = f_log(0.0);
    if lc > at0 + 1e-12 {
        return Err(Error::OutOfRange(format!("C = {c} exceeds the zero-exponent value {}", at0.exp())));
    }
    if lc >= at0 - 1e-12 {
        return Ok((0.0, 0.0));
    }
    let f = |t: f64| f_log(t) - lc;
    let mut lo = 0.0;
    let mut hi = ((count as f64).ln() - lc) / min_log + 1.0;
    while f(hi) > 0.0 {
        hi *= 2.0;
    }
    while hi - lo > tol {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        if f(mid) > 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok((lo, hi))
}

/// Root of `Σ exp(-t · logs_i) = c` by bisection; every `logs_i` must be positive.
pub fn solve_sum(logs: &[f64], c: &Rat, tol: f64) -> Result<(f64, f64)> {
    if logs.iter().any(|&l| l.is_nan() || l <= 0.0) {
        return Err(Error::Presentation("pressure bases must exceed one".into()));
    }
    let count = Rat::from_integer(logs.len().into());
    if *c > count {
        return Err(Error::OutOfRange(format!("C = {c} exceeds the {} cylinders; the root would be negative", logs.len())));
    }
    if *c == count {
        return Ok((0.0, 0.0));
    }
    let f = |t: f64| -> f64 {
        let m = logs.iter().map(|&l| -t * l).fold(f64::NEG_INFINITY, f64::max);
        m + logs.iter().map(|&l| (-t * l - m).exp()).sum::<f64>().ln()
    };
    solve_monotone(f, c, tol, logs.iter().cloned().fold(f64::INFINITY, f64::min), logs.len())
}

#[derive(Clone, Debug, Serialize)]
pub struct DimensionBounds {
    pub depth: usize,
    pub alpha: f64,
    pub beta: f64,
    pub c: String,
    pub tol: f64,
    /// A priori bound on `beta - alpha`, with `beta` standing in for the dimension;
    /// absent when `n log λ ≤ log a`.
    pub gap_bound: Option<f64>,
    pub log_a: f64,
    pub log_lambda: f64,
    pub cylinders: usize,
    /// Only one cylinder at this depth: the set is a single point.
    pub degenerate: bool,
}

impl DimensionBounds {
    pub fn width(&self) -> f64 {
        self.beta - self.alpha
    }

    pub fn contains(&self, x: f64, pad: f64) -> bool {
        self.alpha - pad <= x && x <= self.beta + pad
    }
}

pub fn dimension_bounds(k: &CantorPresentation, n: usize) -> Result<DimensionBounds> {
    dimension_bounds_with(k, n, &Rat::one(), DEFAULT_TOL)
}

pub fn dimension_bounds_with(k: &CantorPresentation, n: usize, c: &Rat, tol: f64) -> Result<DimensionBounds> {
    let stats = derivative_bounds(k, n)?;
    bounds_from_stats(&stats, c, tol)
}

pub fn bounds_from_stats(stats: &PartitionStats, c: &Rat, tol: f64) -> Result<DimensionBounds> {
    let (alpha, _) = solve_pressure(stats, Weights::Upper, c, tol)?;
    let (_, beta) = solve_pressure(stats, Weights::Lower, &Rat::one(), tol)?;
    let log_a = ln(&stats.a);
    let log_lambda = ln(&stats.lambda);
    let denom = stats.depth as f64 * log_lambda - log_a;
    let gap_bound = (denom > 0.0).then(|| (beta * log_a + ln(c)) / denom);
    Ok(DimensionBounds {
        depth: stats.depth,
        alpha,
        beta,
        c: c.to_string(),
        tol,
        gap_bound,
        log_a,
        log_lambda,
        cylinders: stats.cylinders.len(),
        degenerate: stats.cylinders.len() == 1,
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum RemovalMode {
    /// Letters are the remaining `m`-words, concatenated block by block.
    Blocked,
    /// Letters are `m`-word windows of the sequences avoiding the word anywhere.
    Sliding,
}

#[derive(Clone, Debug, Serialize)]
pub struct RemovalReport {
    pub word: Vec<usize>,
    pub mode: RemovalMode,
    pub letters: usize,
    pub bounds: DimensionBounds,
    /// `log(k^m / (k^m - 1)) / (m log λ)`.
    pub predicted_drop: f64,
}

/// Dimension bounds for `K` with the cylinder `I(word)` removed.
pub fn removed_cylinder_bounds(
    k: &CantorPresentation,
    word: &[usize],
    n: usize,
    mode: RemovalMode,
) -> Result<RemovalReport> {
    let removed = remove_word(k, word, mode)?;
    let bounds = dimension_bounds(&removed, n)?;
    let m = word.len() as f64;
    let km = (k.size() as f64).powf(m);
    let lambda = ln(&(Rat::one() / k.max_contraction()));
    Ok(RemovalReport {
        word: word.to_vec(),
        mode,
        letters: removed.size(),
        bounds,
        predicted_drop: (km / (km - 1.0)).ln() / (m * lambda),
    })
}

/// Presentation of the subset of `K` avoiding `word` (as a block or anywhere).
pub fn remove_word(k: &CantorPresentation, word: &[usize], mode: RemovalMode) -> Result<CantorPresentation> {
    if word.is_empty() {
        return Err(Error::Input("empty word".into()));
    }
    k.matrix().check_admissible(word, "removed word")?;
    let m = word.len();
    let (words, adj) = match mode {
        RemovalMode::Blocked => {
            let words: Vec<Vec<usize>> = admissible_words(k.matrix(), m).into_iter().filter(|w| w != word).collect();
            let adj = words
                .iter()
                .map(|u| words.iter().map(|v| k.matrix().allowed(u[m - 1], v[0])).collect())
                .collect();
            (words, adj)
        }
        RemovalMode::Sliding => {
            let r = higher_block(k.matrix(), m, std::slice::from_ref(&word.to_vec()));
            let adj = r.matrix.as_ref().map(|t| t.rows().to_vec()).unwrap_or_default();
            (r.words, adj)
        }
    };
    let (words, matrix) = largest_component(words, adj)
        .ok_or_else(|| Error::EmptySet(format!("removing {word:?} leaves no infinite orbit")))?;
    let mut out = k.recoded(&words, matrix, mode == RemovalMode::Blocked)?;
    out.name = format!("{} without {:?}", k.name, word);
    Ok(out)
}

/// Prunes letters without successor or predecessor, then keeps the largest strongly connected piece.
fn largest_component(mut words: Vec<Vec<usize>>, mut adj: Vec<Vec<bool>>) -> Option<(Vec<Vec<usize>>, TransitionMatrix)> {
    let n = words.len();
    let reach = |adj: &Vec<Vec<bool>>, s: usize, fwd: bool| {
        let mut seen = vec![false; n];
        let mut stack = vec![s];
        while let Some(u) = stack.pop() {
            for v in 0..n {
                let e = if fwd { adj[u][v] } else { adj[v][u] };
                if e && !seen[v] {
                    seen[v] = true;
                    stack.push(v);
                }
            }
        }
        seen
    };
    let mut best: Option<Vec<usize>> = None;
    let mut done = vec![false; n];
    for s in 0..n {
        if done[s] {
            continue;
        }
        let f = reach(&adj, s, true);
        let b = reach(&adj, s, false);
        let comp: Vec<usize> = (0..n).filter(|&v| f[v] && b[v]).collect();
        for &v in &comp {
            done[v] = true;
        }
        if !comp.is_empty() && best.as_ref().is_none_or(|c| comp.len() > c.len()) {
            best = Some(comp);
        }
    }
    let comp = best?;
    adj = comp.iter().map(|&i| comp.iter().map(|&j| adj[i][j]).collect()).collect();
    words = comp.iter().map(|&i| words[i].clone()).collect();
    Some((words, TransitionMatrix::new(adj).ok()?))
}

/// Bounds for a product `K × K'`: the sum of the factors' bounds.
pub fn product_bounds(a: &DimensionBounds, b: &DimensionBounds) -> (f64, f64) {
    (a.alpha + b.alpha, a.beta + b.beta)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numeric::rational::{int, rat};

    fn stats_from(bases: &[i64]) -> PartitionStats {
        PartitionStats {
            depth: 1,
            cylinders: bases
                .iter()
                .map(|&b| CylinderStat { word: vec![0], lower: int(b), upper: int(b) })
                .collect(),
            a: int(1),
            lambda: int(2),
            a_n: int(1),
            b_n: int(1),
            matrix: TransitionMatrix::full(1),
        }
    }

    #[test]
    fn pressure_closed_forms() {
        let (lo, hi) = solve_pressure(&stats_from(&[3, 3]), Weights::Lower, &int(1), 1e-12).unwrap();
        let exact = 2f64.ln() / 3f64.ln();
        assert!(lo <= exact + 1e-15 && exact - 1e-15 <= hi && hi - lo <= 1e-12);
        let (lo, _) = solve_pressure(&stats_from(&[2, 4]), Weights::Lower, &int(1), 1e-12).unwrap();
        let phi = (1.0 + 5f64.sqrt()) / 2.0;
        assert!((lo - phi.log2()).abs() < 1e-11);
        assert_eq!(solve_pressure(&stats_from(&[3, 3]), Weights::Lower, &int(2), 1e-12).unwrap(), (0.0, 0.0));
        assert!(matches!(
            solve_pressure(&stats_from(&[3, 3]), Weights::Lower, &int(3), 1e-12),
            Err(Error::OutOfRange(_))
        ));
    }

    #[test]
    fn k_alpha_derivatives_are_exact() {
        let k = CantorPresentation::k_alpha(rat(1, 3)).unwrap();
        let s = derivative_bounds(&k, 4).unwrap();
        assert_eq!(s.cylinders.len(), 16);
        assert!(s.cylinders.iter().all(|c| c.lower == int(81) && c.upper == int(81)));
        assert_eq!(s.a, int(1));
    }

    #[test]
    fn c2_derivative_enclosure_contains_samples() {
        let k = CantorPresentation::continued_fraction(2).unwrap();
        let s = derivative_bounds(&k, 1).unwrap();
        let (lo, hi) = (0.5f64 * (3f64.sqrt() - 1.0), 3f64.sqrt() - 1.0);
        for c in &s.cylinders {
            let d = c.word[0] as f64 + 1.0;
            for i in 0..=100 {
                let y = lo + (hi - lo) * i as f64 / 100.0;
                let g = (d + y) * (d + y);
                assert!(rational::to_f64(&c.lower) <= g * (1.0 + 1e-12));
                assert!(g <= rational::to_f64(&c.upper) * (1.0 + 1e-12));
            }
        }
    }

    #[test]
    fn removing_a_letter_leaves_a_point() {
        let k = CantorPresentation::k_alpha(rat(1, 3)).unwrap();
        let r = removed_cylinder_bounds(&k, &[1], 3, RemovalMode::Blocked).unwrap();
        assert!(r.bounds.degenerate);
        assert_eq!((r.bounds.alpha, r.bounds.beta), (0.0, 0.0));
    }

    #[test]
    fn removing_000_blocked() {
        let k = CantorPresentation::k_alpha(rat(1, 3)).unwrap();
        let r = removed_cylinder_bounds(&k, &[0, 0, 0], 2, RemovalMode::Blocked).unwrap();
        assert_eq!(r.letters, 7);
        let exact = 7f64.ln() / 27f64.ln();
        assert!((r.bounds.alpha - exact).abs() < 1e-9 && (r.bounds.beta - exact).abs() < 1e-9);
        assert!((r.predicted_drop - (8f64 / 7.0).ln() / (3.0 * 3f64.ln())).abs() < 1e-15);
    }
}
