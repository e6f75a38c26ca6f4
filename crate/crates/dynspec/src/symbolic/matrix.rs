use num_bigint::BigUint;
use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};
use std::collections::VecDeque;

use crate::error::{Error, Result};

/// 0/1 transition matrix of a subshift of finite type.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct TransitionMatrix {
    n: usize,
    entries: Vec<Vec<bool>>,
    labels: Option<Vec<String>>,
}

#[derive(Serialize, Deserialize)]
struct MatrixJson {
    alphabet: usize,
    transitions: Vec<Vec<u8>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    labels: Option<Vec<String>>,
}

impl TransitionMatrix {
    pub fn new(entries: Vec<Vec<bool>>) -> Result<Self> {
        let n = entries.len();
        if n == 0 {
            return Err(Error::Input("empty alphabet".into()));
        }
        if entries.iter().any(|r| r.len() != n) {
            return Err(Error::Input("transition matrix is not square".into()));
        }
        for i in 0..n {
            if !entries[i].iter().any(|&b| b) {
                return Err(Error::Input(format!("letter {i} has no successor")));
            }
            if !(0..n).any(|j| entries[j][i]) {
                return Err(Error::Input(format!("letter {i} has no predecessor")));
            }
        }
        Ok(Self { n, entries, labels: None })
    }

    pub fn from_rows(rows: &[&[u8]]) -> Result<Self> {
        Self::new(rows.iter().map(|r| r.iter().map(|&b| b != 0).collect()).collect())
    }

    pub fn with_labels(mut self, labels: Vec<String>) -> Result<Self> {
        if labels.len() != self.n {
            return Err(Error::Input("label count differs from alphabet size".into()));
        }
        self.labels = Some(labels);
        Ok(self)
    }

    pub fn full(n: usize) -> Self {
        Self::new(vec![vec![true; n]; n]).expect("full shift is valid")
    }

    /// `[[1,1],[1,0]]`: the letter 1 may not follow itself.
    pub fn golden_mean() -> Self {
        Self::from_rows(&[&[1, 1], &[1, 0]]).unwrap()
    }

    pub fn cycle(n: usize) -> Self {
        let mut e = vec![vec![false; n]; n];
        for (i, row) in e.iter_mut().enumerate() {
            row[(i + 1) % n] = true;
        }
        Self::new(e).unwrap()
    }

    pub fn size(&self) -> usize {
        self.n
    }

    pub fn labels(&self) -> Option<&[String]> {
        self.labels.as_deref()
    }

    pub fn allowed(&self, i: usize, j: usize) -> bool {
        self.entries[i][j]
    }

    pub fn rows(&self) -> &[Vec<bool>] {
        &self.entries
    }

    pub fn transpose(&self) -> Self {
        let e = (0..self.n).map(|i| (0..self.n).map(|j| self.entries[j][i]).collect()).collect();
        Self { n: self.n, entries: e, labels: self.labels.clone() }
    }

    pub fn successors(&self, i: usize) -> impl Iterator<Item = usize> + '_ {
        (0..self.n).filter(move |&j| self.entries[i][j])
    }

    pub fn check_letter(&self, a: usize) -> Result<()> {
        if a < self.n {
            Ok(())
        } else {
            Err(Error::Input(format!("letter {a} outside alphabet of size {}", self.n)))
        }
    }

    /// True iff consecutive pairs are allowed; letters must be in range.
    pub fn is_admissible(&self, word: &[usize]) -> Result<bool> {
        if word.is_empty() {
            return Err(Error::Input("empty word".into()));
        }
        for &a in word {
            self.check_letter(a)?;
        }
        Ok(word.windows(2).all(|w| self.entries[w[0]][w[1]]))
    }

    pub fn check_admissible(&self, word: &[usize], what: &str) -> Result<()> {
        for &a in word {
            self.check_letter(a)?;
        }
        for (k, w) in word.windows(2).enumerate() {
            if !self.entries[w[0]][w[1]] {
                return Err(Error::Inadmissible {
                    from: w[0],
                    to: w[1],
                    location: format!("{what} index {k}"),
                });
            }
        }
        Ok(())
    }

    /// Cyclic admissibility: the word followed by its own first letter.
    pub fn is_cycle(&self, word: &[usize]) -> bool {
        !word.is_empty()
            && word.windows(2).all(|w| self.entries[w[0]][w[1]])
            && self.entries[*word.last().unwrap()][word[0]]
    }

    /// Entry `(x, y)` of `B^n`, exactly.
    pub fn count_paths(&self, x: usize, y: usize, n: usize) -> Result<BigUint> {
        self.check_letter(x)?;
        self.check_letter(y)?;
        let mut v: Vec<BigUint> = vec![BigUint::zero(); self.n];
        v[x] = BigUint::one();
        for _ in 0..n {
            let mut w = vec![BigUint::zero(); self.n];
            for (i, vi) in v.iter().enumerate() {
                if vi.is_zero() {
                    continue;
                }
                for j in self.successors(i) {
                    w[j] += vi;
                }
            }
            v = w;
        }
        Ok(v.swap_remove(y))
    }

    /// Trace of `B^n`: the number of points of period `n`.
    pub fn trace_power(&self, n: usize) -> BigUint {
        (0..self.n).map(|x| self.count_paths(x, x, n).unwrap()).sum()
    }

    fn reverse_distances(&self, y: usize) -> Vec<Option<usize>> {
        let mut dist = vec![None; self.n];
        dist[y] = Some(0);
        let mut q = VecDeque::from([y]);
        while let Some(v) = q.pop_front() {
            let dv = dist[v].unwrap();
            for u in 0..self.n {
                if self.entries[u][v] && dist[u].is_none() {
                    dist[u] = Some(dv + 1);
                    q.push_back(u);
                }
            }
        }
        dist
    }

    /// Shortest number of transitions from `x` to `y` (at least one).
    pub fn connecting_length(&self, x: usize, y: usize) -> Option<usize> {
        let dist = self.reverse_distances(y);
        self.successors(x).filter_map(|s| dist[s]).min().map(|d| d + 1)
    }

    /// Shortest interior word `w` with `(x, w.., y)` admissible, lexicographically least among ties.
    pub fn connecting_word(&self, x: usize, y: usize) -> Result<Vec<usize>> {
        self.check_letter(x)?;
        self.check_letter(y)?;
        let dist = self.reverse_distances(y);
        let total = self
            .successors(x)
            .filter_map(|s| dist[s])
            .min()
            .map(|d| d + 1)
            .ok_or(Error::NoPath { from: x, to: y })?;
        let mut out = Vec::with_capacity(total - 1);
        let mut cur = x;
        let mut remaining = total;
        while remaining > 1 {
            let next = self
                .successors(cur)
                .find(|&s| dist[s] == Some(remaining - 1))
                .expect("distance labels are consistent");
            out.push(next);
            cur = next;
            remaining -= 1;
        }
        Ok(out)
    }

    /// Maximum over letter pairs of the shortest connecting length.
    pub fn max_connecting_length(&self) -> Option<usize> {
        let mut best = 0;
        for y in 0..self.n {
            let dist = self.reverse_distances(y);
            for x in 0..self.n {
                let l = self.successors(x).filter_map(|s| dist[s]).min()? + 1;
                best = best.max(l);
            }
        }
        Some(best)
    }

    pub fn is_irreducible(&self) -> bool {
        (0..self.n).all(|y| self.reverse_distances(y).iter().all(Option::is_some))
    }

    /// Irreducible and aperiodic, tested by positivity of a boolean power.
    pub fn is_primitive(&self) -> bool {
        if !self.is_irreducible() {
            return false;
        }
        let bound = (self.n - 1) * (self.n - 1) + 1;
        let mut p = self.entries.clone();
        for _ in 1..bound {
            p = bool_mul(&p, &self.entries);
        }
        p.iter().all(|r| r.iter().all(|&b| b))
    }

    pub fn to_json(&self) -> serde_json::Value {
        serde_json::to_value(MatrixJson {
            alphabet: self.n,
            transitions: self
                .entries
                .iter()
                .map(|r| r.iter().map(|&b| b as u8).collect())
                .collect(),
            labels: self.labels.clone(),
        })
        .unwrap()
    }

    pub fn from_json(v: &serde_json::Value) -> Result<Self> {
        let m: MatrixJson =
            serde_json::from_value(v.clone()).map_err(|e| Error::Input(format!("SFT JSON: {e}")))?;
        if m.transitions.len() != m.alphabet {
            return Err(Error::Input("alphabet size differs from transition rows".into()));
        }
        if m.transitions.iter().flatten().any(|&b| b > 1) {
            return Err(Error::Input("transition entries must be 0 or 1".into()));
        }
        let t = Self::new(m.transitions.iter().map(|r| r.iter().map(|&b| b == 1).collect()).collect())?;
        match m.labels {
            Some(l) => t.with_labels(l),
            None => Ok(t),
        }
    }
}

fn bool_mul(a: &[Vec<bool>], b: &[Vec<bool>]) -> Vec<Vec<bool>> {
    let n = a.len();
    (0..n)
        .map(|i| (0..n).map(|j| (0..n).any(|k| a[i][k] && b[k][j])).collect())
        .collect()
}

impl Serialize for TransitionMatrix {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        self.to_json().serialize(s)
    }
}

impl<'de> Deserialize<'de> for TransitionMatrix {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let v = serde_json::Value::deserialize(d)?;
        Self::from_json(&v).map_err(serde::de::Error::custom)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn brute_paths(b: &TransitionMatrix, x: usize, y: usize, n: usize) -> u64 {
        fn go(b: &TransitionMatrix, cur: usize, y: usize, left: usize) -> u64 {
            if left == 0 {
                return (cur == y) as u64;
            }
            b.successors(cur).map(|s| go(b, s, y, left - 1)).sum()
        }
        go(b, x, y, n)
    }

    #[test]
    fn golden_mean_counts_are_fibonacci() {
        let g = TransitionMatrix::golden_mean();
        let got: Vec<u64> = (1..=6)
            .map(|n| g.count_paths(0, 0, n).unwrap().try_into().unwrap())
            .collect();
        assert_eq!(got, vec![1, 2, 3, 5, 8, 13]);
        for n in 0..8 {
            let c: u64 = g.count_paths(1, 0, n).unwrap().try_into().unwrap();
            assert_eq!(c, brute_paths(&g, 1, 0, n));
        }
    }

    #[test]
    fn identity_power() {
        let g = TransitionMatrix::golden_mean();
        assert_eq!(g.count_paths(0, 0, 0).unwrap(), BigUint::one());
        assert_eq!(g.count_paths(0, 1, 0).unwrap(), BigUint::zero());
        assert_eq!(TransitionMatrix::full(2).count_paths(0, 1, 2).unwrap(), BigUint::from(2u32));
    }

    #[test]
    fn connecting_words() {
        assert!(TransitionMatrix::full(2).connecting_word(0, 1).unwrap().is_empty());
        assert_eq!(TransitionMatrix::golden_mean().connecting_word(1, 1).unwrap(), vec![0]);
        assert_eq!(TransitionMatrix::cycle(3).connecting_word(0, 0).unwrap(), vec![1, 2]);
        let reducible = TransitionMatrix::from_rows(&[&[1, 1], &[0, 1]]);
        assert!(reducible.is_err() || reducible.unwrap().connecting_word(1, 0).is_err());
    }

    #[test]
    fn connecting_word_is_lexicographic() {
        // 0 -> {1,2}, 1 -> 3, 2 -> 3, 3 -> 0
        let b = TransitionMatrix::from_rows(&[&[0, 1, 1, 0], &[0, 0, 0, 1], &[0, 0, 0, 1], &[1, 0, 0, 0]])
            .unwrap();
        assert_eq!(b.connecting_word(0, 3).unwrap(), vec![1]);
        assert_eq!(b.max_connecting_length(), Some(3));
    }

    #[test]
    fn flags() {
        assert!(TransitionMatrix::golden_mean().is_primitive());
        assert!(TransitionMatrix::cycle(3).is_irreducible());
        assert!(!TransitionMatrix::cycle(3).is_primitive());
        assert!(TransitionMatrix::new(vec![vec![true, false], vec![true, false]]).is_err());
    }

    #[test]
    fn admissibility() {
        let g = TransitionMatrix::golden_mean();
        assert!(!g.is_admissible(&[1, 1]).unwrap());
        assert!(g.is_admissible(&[0]).unwrap());
        assert!(TransitionMatrix::full(2).is_admissible(&[0, 1, 0, 1]).unwrap());
        assert!(g.is_admissible(&[0, 2]).is_err());
    }

    #[test]
    fn json_round_trip() {
        let g = TransitionMatrix::golden_mean().with_labels(vec!["a".into(), "b".into()]).unwrap();
        let back = TransitionMatrix::from_json(&g.to_json()).unwrap();
        assert_eq!(back, g);
    }
}
