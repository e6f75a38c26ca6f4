use rayon::prelude::*;
use serde::Serialize;

use super::observable::ShiftObservable;
use crate::cantor::cf::cf_digits_value;
use crate::error::{Error, Result};
use crate::numeric::surd::{decimal, rat_decimal};
use crate::numeric::{QuadSurd, Rat, SurdSum};
use crate::symbolic::{enumerate_periodic, SymbolicSequence, TransitionMatrix};

/// Where a supremum is reached.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Attained {
    /// At `σ^n x` for the listed `n`.
    Positions { shifts: Vec<i64> },
    /// Only approached along a tail, by the orbit of the given periodic point.
    Limit { orbit: SymbolicSequence },
}

#[derive(Clone, Debug, Serialize)]
pub struct MarkovValue {
    pub value: SurdSum,
    pub attained: Attained,
}

/// `sup_n f(σ^n x)` for an eventually periodic `x`, computed exactly.
///
/// Positions outside a window around the core fall into finitely many residue
/// classes mod twice the tail period; along each class the value moves
/// monotonically towards its value on the limiting periodic orbit, so the sup is
/// the max of the window values and those limit values.
pub fn markov_value(f: &ShiftObservable, x: &SymbolicSequence) -> Result<MarkovValue> {
    if !f.monotone_tails() {
        return Err(Error::Input("observable is not monotone along tails; sup is not certified".into()));
    }
    let (cs, ce) = x.core_span();
    let m = f.radius() as i64;
    let pl = x.left_period().len() as i64;
    let pr = x.right_period().len() as i64;
    let lo = cs - m - 2 * pl - 1;
    let hi = ce + m + 2 * pr + 1;
    let vals: Vec<(i64, SurdSum)> = (lo..=hi).into_par_iter().map(|n| (n, f.eval(&x.shift(n)))).collect();
    let mut best = vals[0].1.clone();
    for (_, v) in &vals {
        if *v > best {
            best = v.clone();
        }
    }
    let mut limits = Vec::new();
    for per in [x.right_period(), x.left_period()] {
        let y = SymbolicSequence::periodic(per);
        for j in 0..per.len() as i64 {
            let ys = y.shift(j);
            limits.push((f.eval(&ys), ys));
        }
    }
    let shifts: Vec<i64> = vals.iter().filter(|(_, v)| *v == best).map(|(n, _)| *n).collect();
    if let Some((lv, orbit)) = limits.into_iter().max_by(|a, b| a.0.cmp(&b.0)) {
        if lv > best {
            return Ok(MarkovValue { value: lv, attained: Attained::Limit { orbit } });
        }
    }
    Ok(MarkovValue { value: best, attained: Attained::Positions { shifts } })
}

/// `limsup_{n→∞} f(σ^n x)`: the Markov value of the forward limiting periodic orbit.
pub fn lagrange_value(f: &ShiftObservable, x: &SymbolicSequence) -> Result<MarkovValue> {
    markov_value(f, &SymbolicSequence::periodic(x.right_period()))
}

/// Classical Lagrange value `limsup ([a_n; a_{n+1}, ...] + [0; a_{n-1}, ...])` of the
/// real number whose digits are `prefix` followed by `period` repeated.
pub fn classical_lagrange(prefix: &[u64], period: &[u64]) -> Result<QuadSurd> {
    if period.is_empty() || period.contains(&0) || prefix.iter().skip(1).any(|&d| d == 0) {
        return Err(Error::Input("digits must be positive and the period nonempty".into()));
    }
    let p = period.len();
    let mut best: Option<QuadSurd> = None;
    for j in 0..p {
        let fwd: Vec<u64> = period[j..].iter().chain(&period[..j]).copied().collect();
        let alpha = cf_digits_value(&[], &fwd);
        let back: Vec<u64> = fwd.iter().rev().copied().collect();
        let beta = cf_digits_value(&[], &back).recip();
        let v = alpha.add(&beta);
        if best.as_ref().map_or(true, |b| v > *b) {
            best = Some(v);
        }
    }
    Ok(best.unwrap())
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum SampleKind {
    Markov,
    Lagrange,
}

/// An exact spectrum value with a dyadic enclosure and a witness attaining it.
#[derive(Clone, Debug, Serialize)]
pub struct SpectrumSample {
    pub value: SurdSum,
    pub lo: Rat,
    pub hi: Rat,
    pub decimal: String,
    pub witness: SymbolicSequence,
    pub kind: SampleKind,
}

impl SpectrumSample {
    pub fn new(value: SurdSum, witness: SymbolicSequence, kind: SampleKind) -> Self {
        let e = value.enclose(64);
        Self { decimal: decimal(&value), lo: e.lo, hi: e.hi, value, witness, kind }
    }

    pub fn period(&self) -> usize {
        self.witness.right_period().len()
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct Gap {
    pub lo: SurdSum,
    pub hi: SurdSum,
    pub width: f64,
}

#[derive(Clone, Debug, Serialize)]
pub struct SpectrumScan {
    pub max_period: usize,
    pub orbits: usize,
    /// Distinct values in increasing order, each with one witness orbit.
    pub values: Vec<SpectrumSample>,
    /// Widest gaps between consecutive values, widest first.
    pub gaps: Vec<Gap>,
}

/// Markov values of all periodic orbits up to `max_period`; on periodic points
/// the Markov and Lagrange values agree.
pub fn spectrum_scan(f: &ShiftObservable, b: &TransitionMatrix, max_period: usize, top_gaps: usize) -> Result<SpectrumScan> {
    let orbits = enumerate_periodic(b, max_period);
    let mut pts = orbits
        .par_iter()
        .map(|x| markov_value(f, x).map(|v| (v.value, x.clone())))
        .collect::<Result<Vec<_>>>()?;
    pts.sort_by(|a, b| {
        a.0.cmp(&b.0)
            .then_with(|| a.1.right_period().len().cmp(&b.1.right_period().len()))
            .then_with(|| a.1.cmp(&b.1))
    });
    pts.dedup_by(|a, b| a.0 == b.0);
    let values: Vec<SpectrumSample> =
        pts.into_iter().map(|(value, orbit)| SpectrumSample::new(value, orbit, SampleKind::Markov)).collect();
    let mut gaps: Vec<Gap> = values
        .windows(2)
        .map(|w| Gap { lo: w[0].value.clone(), hi: w[1].value.clone(), width: w[1].value.sub(&w[0].value).to_f64() })
        .collect();
    gaps.sort_by(|a, b| b.width.total_cmp(&a.width));
    gaps.truncate(top_gaps);
    Ok(SpectrumScan { max_period, orbits: orbits.len(), values, gaps })
}

impl SpectrumScan {
    /// One row per value: `value_lo,value_hi,period,witness`.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("value_lo,value_hi,period,witness\n");
        for v in &self.values {
            out.push_str(&format!(
                "{},{},{},{}\n",
                rat_decimal(&v.lo),
                rat_decimal(&v.hi),
                v.period(),
                v.witness.right_period().iter().map(|a| a.to_string()).collect::<Vec<_>>().join(" ")
            ));
        }
        out
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct InclusionWitness {
    pub point: SymbolicSequence,
    pub lagrange: SurdSum,
    /// `σ^j` of the limiting periodic orbit, positioned so its own sup sits at 0.
    pub markov_witness: SymbolicSequence,
    pub markov: SurdSum,
    pub holds: bool,
}

/// For each point, checks that its Lagrange value is the Markov value of a point.
pub fn check_l_subset_m(f: &ShiftObservable, points: &[SymbolicSequence]) -> Result<Vec<InclusionWitness>> {
    points
        .iter()
        .map(|x| {
            let l = lagrange_value(f, x)?;
            let y = SymbolicSequence::periodic(x.right_period());
            let at = match &l.attained {
                Attained::Positions { shifts } => shifts[0],
                Attained::Limit { .. } => 0,
            };
            let w = y.shift(at);
            let m = markov_value(f, &w)?;
            let holds = m.value == l.value && f.eval(&w) == m.value;
            Ok(InclusionWitness { point: x.clone(), lagrange: l.value, markov_witness: w, markov: m.value, holds })
        })
        .collect()
}
