use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};
use std::fmt;

use super::matrix::TransitionMatrix;
use crate::error::{Error, Result};
use crate::numeric::Rat;

/// Bi-infinite sequence `…LLL · core · RRR…`, eventually periodic on both sides.
///
/// `offset` is the index into `core` of the symbol sitting at position 0; it may
/// point outside the core, in which case position 0 lies in a periodic tail.
/// Values are always kept canonical: primitive periods, minimal core, and for
/// purely periodic sequences an empty core with `left == right` and `offset = 0`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct SymbolicSequence {
    left: Vec<usize>,
    core: Vec<usize>,
    right: Vec<usize>,
    offset: i64,
}

#[derive(Serialize, Deserialize)]
struct SequenceJson {
    left: Vec<usize>,
    core: Vec<usize>,
    right: Vec<usize>,
    offset: i64,
}

fn primitive_root(w: &[usize]) -> Vec<usize> {
    let n = w.len();
    for p in 1..=n {
        if n % p == 0 && (p..n).all(|i| w[i] == w[i - p]) {
            return w[..p].to_vec();
        }
    }
    w.to_vec()
}

impl SymbolicSequence {
    pub fn new(left: Vec<usize>, core: Vec<usize>, right: Vec<usize>, offset: i64) -> Result<Self> {
        if left.is_empty() || right.is_empty() {
            return Err(Error::Input("periodic tails must be nonempty".into()));
        }
        let mut s = Self { left: primitive_root(&left), core, right: primitive_root(&right), offset };
        s.canonicalize();
        Ok(s)
    }

    /// The periodic point `…www.www…` with `w[0]` at position 0.
    pub fn periodic(word: &[usize]) -> Self {
        Self::new(word.to_vec(), vec![], word.to_vec(), 0).expect("nonempty period")
    }

    pub fn left_period(&self) -> &[usize] {
        &self.left
    }
    pub fn core(&self) -> &[usize] {
        &self.core
    }
    pub fn right_period(&self) -> &[usize] {
        &self.right
    }
    pub fn offset(&self) -> i64 {
        self.offset
    }

    /// Position of `core[0]`.
    pub fn core_start(&self) -> i64 {
        -self.offset
    }

    /// Position just past the core.
    pub fn core_end(&self) -> i64 {
        -self.offset + self.core.len() as i64
    }

    pub fn is_periodic(&self) -> bool {
        self.core.is_empty() && self.left == self.right
    }

    pub fn at(&self, i: i64) -> usize {
        let j = i + self.offset;
        let len = self.core.len() as i64;
        if j < 0 {
            self.left[j.rem_euclid(self.left.len() as i64) as usize]
        } else if j < len {
            self.core[j as usize]
        } else {
            self.right[(j - len).rem_euclid(self.right.len() as i64) as usize]
        }
    }

    /// Symbols at positions `lo..=hi`.
    pub fn window(&self, lo: i64, hi: i64) -> Vec<usize> {
        (lo..=hi).map(|i| self.at(i)).collect()
    }

    /// `σ^k`, where `(σx)_i = x_{i+1}`.
    pub fn shift(&self, k: i64) -> Self {
        let mut s = self.clone();
        s.offset += k;
        s.canonicalize();
        s
    }

    fn canonicalize(&mut self) {
        if self.core.is_empty() && self.left == self.right {
            let m = self.right.len() as i64;
            let r = self.offset.rem_euclid(m) as usize;
            self.right.rotate_left(r);
            self.left = self.right.clone();
            self.offset = 0;
            return;
        }
        // absorb core symbols into the left tail
        while !self.core.is_empty() && self.core[0] == self.left[0] {
            self.core.remove(0);
            self.left.rotate_left(1);
            self.offset -= 1;
        }
        while !self.core.is_empty() && self.core.last() == self.right.last() {
            self.core.pop();
            self.right.rotate_right(1);
        }
        if self.core.is_empty() {
            if self.left == self.right {
                self.canonicalize();
                return;
            }
            // slide the junction right while the left tail still agrees
            let limit = self.left.len() * self.right.len() + 1;
            let mut steps = 0;
            while self.right[0] == self.left[0] && steps < limit {
                self.left.rotate_left(1);
                self.right.rotate_left(1);
                self.offset -= 1;
                steps += 1;
            }
            if self.left == self.right {
                self.canonicalize();
            }
        }
    }

    /// Admissibility of the whole bi-infinite concatenation.
    pub fn check_admissible(&self, b: &TransitionMatrix) -> Result<()> {
        b.check_admissible(&self.left, "left period")?;
        b.check_admissible(&self.right, "right period")?;
        b.check_admissible(&self.core, "core")?;
        let cyc = |w: &[usize], what: &str| -> Result<()> {
            let (x, y) = (*w.last().unwrap(), w[0]);
            if b.allowed(x, y) {
                Ok(())
            } else {
                Err(Error::Inadmissible { from: x, to: y, location: format!("{what} wrap-around") })
            }
        };
        cyc(&self.left, "left period")?;
        cyc(&self.right, "right period")?;
        let l = *self.left.last().unwrap();
        let (first, last) = match (self.core.first(), self.core.last()) {
            (Some(&f), Some(&g)) => (f, g),
            _ => (self.right[0], l),
        };
        if !b.allowed(l, first) {
            return Err(Error::Inadmissible { from: l, to: first, location: "left junction".into() });
        }
        if !self.core.is_empty() && !b.allowed(last, self.right[0]) {
            return Err(Error::Inadmissible {
                from: last,
                to: self.right[0],
                location: "right junction".into(),
            });
        }
        Ok(())
    }

    /// Left period plus the symbols on `[p0, p]` for some `p0 <= p` at which the
    /// left period is aligned, so that `left^∞ · segment` reproduces `x_{≤p}`.
    pub fn left_part(&self, p: i64) -> (Vec<usize>, Vec<usize>) {
        let m = self.left.len() as i64;
        let start = self.core_start();
        let p0 = if start <= p + 1 { start } else { start - m * Integer::div_ceil(&(start - p - 1), &m) };
        (self.left.clone(), self.window(p0, p))
    }

    /// Symbols on `[p, p1]` plus the right period, reproducing `x_{≥p}`.
    pub fn right_part(&self, p: i64) -> (Vec<usize>, Vec<usize>) {
        let m = self.right.len() as i64;
        let end = self.core_end();
        let p1 = if end >= p { end } else { end + m * Integer::div_ceil(&(p - end), &m) };
        (self.window(p, p1 - 1), self.right.clone())
    }

    /// `x_{≤p}` from `self`, then `middle`, then `y_{≥q}` from `other`.
    /// Position 0 of the result is `zero` symbols past the first symbol of `middle`;
    /// `zero = -1` puts it on `x_p`.
    pub fn splice(&self, p: i64, middle: &[usize], other: &SymbolicSequence, q: i64, zero: i64) -> Self {
        let (left, mut core) = self.left_part(p);
        let prefix = core.len() as i64;
        core.extend_from_slice(middle);
        let (tail, right) = other.right_part(q);
        core.extend(tail);
        Self::new(left, core, right, prefix + zero).expect("tails nonempty")
    }

    pub fn to_json(&self) -> serde_json::Value {
        serde_json::to_value(SequenceJson {
            left: self.left.clone(),
            core: self.core.clone(),
            right: self.right.clone(),
            offset: self.offset,
        })
        .unwrap()
    }

    pub fn from_json(v: &serde_json::Value) -> Result<Self> {
        let s: SequenceJson = serde_json::from_value(v.clone())
            .map_err(|e| Error::Input(format!("sequence JSON: {e}")))?;
        Self::new(s.left, s.core, s.right, s.offset)
    }

    /// Positions outside of which both tails are purely periodic.
    pub fn core_span(&self) -> (i64, i64) {
        (self.core_start(), self.core_end())
    }
}

impl Serialize for SymbolicSequence {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        self.to_json().serialize(s)
    }
}

impl<'de> Deserialize<'de> for SymbolicSequence {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let v = serde_json::Value::deserialize(d)?;
        Self::from_json(&v).map_err(serde::de::Error::custom)
    }
}

impl fmt::Display for SymbolicSequence {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let w = |v: &[usize]| v.iter().map(|a| a.to_string()).collect::<Vec<_>>().join(",");
        if self.is_periodic() {
            return write!(f, "({})^Z@{}", w(&self.right), self.offset);
        }
        write!(f, "({})^-inf [{}]@{} ({})^+inf", w(&self.left), w(&self.core), self.offset, w(&self.right))
    }
}

/// Exact value of `sum_n 2^{-(2|n|+1)} [a_n != b_n]`.
pub fn metric_distance(a: &SymbolicSequence, b: &SymbolicSequence) -> Rat {
    let lo = a.core_start().min(b.core_start()).min(0);
    let hi = a.core_end().max(b.core_end()).max(1);
    let weight = |n: i64| -> Rat {
        let e = 2 * n.unsigned_abs() + 1;
        Rat::new(BigInt::one(), BigInt::one() << e as usize)
    };
    let mut total = Rat::zero();
    for n in lo..hi {
        if a.at(n) != b.at(n) {
            total += weight(n);
        }
    }
    let quarter_power = |p: usize| Rat::one() - Rat::new(BigInt::one(), BigInt::one() << (2 * p));
    // positive tail: n >= hi, difference pattern periodic with period pr
    let pr = a.right.len().lcm(&b.right.len());
    let mut block = Rat::zero();
    for k in 0..pr as i64 {
        if a.at(hi + k) != b.at(hi + k) {
            block += weight(hi + k);
        }
    }
    total += block / quarter_power(pr);
    // negative tail: n < lo
    let pl = a.left.len().lcm(&b.left.len());
    let mut block = Rat::zero();
    for k in 1..=pl as i64 {
        if a.at(lo - k) != b.at(lo - k) {
            block += weight(lo - k);
        }
    }
    total += block / quarter_power(pl);
    total
}

/// `[a, b]`: positions `≤ 0` from `b`, positions `≥ 1` from `a`.
pub fn bracket(a: &SymbolicSequence, b: &SymbolicSequence) -> Result<SymbolicSequence> {
    if a.at(0) != b.at(0) {
        return Err(Error::BracketUndefined { a0: a.at(0), b0: b.at(0) });
    }
    Ok(b.splice(0, &[], a, 1, -1))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numeric::rational::rat;

    fn seq(l: &[usize], c: &[usize], r: &[usize], o: i64) -> SymbolicSequence {
        SymbolicSequence::new(l.to_vec(), c.to_vec(), r.to_vec(), o).unwrap()
    }

    #[test]
    fn canonical_forms_agree() {
        let a = seq(&[0], &[0, 0, 1, 1], &[1], 2);
        let b = seq(&[0, 0], &[], &[1, 1, 1], 0);
        for i in -5..5 {
            assert_eq!(a.at(i), b.at(i), "position {i}");
        }
        assert_eq!(a, b);
        let p = seq(&[0, 1], &[0, 1, 0], &[1, 0], 3);
        assert!(p.is_periodic());
        assert_eq!(p, SymbolicSequence::periodic(&[1, 0]));
    }

    #[test]
    fn shift_moves_positions() {
        let a = seq(&[0], &[2, 1], &[1, 0], 0);
        let s = a.shift(3);
        for i in -6..6 {
            assert_eq!(s.at(i), a.at(i + 3));
        }
        assert_eq!(a.shift(2).shift(-2), a);
    }

    #[test]
    fn metric_examples() {
        let zero = SymbolicSequence::periodic(&[0]);
        assert_eq!(metric_distance(&zero, &zero), Rat::zero());
        let spike = seq(&[0], &[1], &[0], 0);
        assert_eq!(metric_distance(&zero, &spike), rat(1, 2));
        let tail = seq(&[0], &[0], &[1], 0);
        assert_eq!(metric_distance(&zero, &tail), rat(1, 6));
    }

    #[test]
    fn bracket_examples() {
        let a = seq(&[0], &[0], &[1], 0);
        let b = seq(&[1], &[0], &[0], 0);
        let c = bracket(&a, &b).unwrap();
        assert_eq!(c, seq(&[1], &[0], &[1], 0));
        assert_eq!(bracket(&a, &a).unwrap(), a);
        assert_eq!(bracket(&c, &b).unwrap(), c);
        let d = seq(&[1], &[1], &[1], 0);
        assert!(bracket(&a, &d).is_err());
    }

    #[test]
    fn splice_keeps_tails() {
        let x = seq(&[2], &[0, 1], &[3], 1);
        let y = x.splice(0, &[5, 6], &x, 1, 1);
        assert_eq!(y.at(0), 6);
        assert_eq!(y.at(-1), 5);
        assert_eq!(y.at(-2), x.at(0));
        assert_eq!(y.at(1), x.at(1));
        assert_eq!(y.left_period(), x.left_period());
        assert_eq!(y.right_period(), x.right_period());
    }

    #[test]
    fn admissibility_of_junctions() {
        let g = TransitionMatrix::golden_mean();
        assert!(seq(&[0], &[1], &[0], 0).check_admissible(&g).is_ok());
        assert!(seq(&[0], &[1, 1], &[0], 0).check_admissible(&g).is_err());
        assert!(SymbolicSequence::periodic(&[1]).check_admissible(&g).is_err());
    }

    #[test]
    fn json_round_trip() {
        let a = seq(&[0, 1], &[1, 1, 0], &[0], 1);
        assert_eq!(SymbolicSequence::from_json(&a.to_json()).unwrap(), a);
    }
}
