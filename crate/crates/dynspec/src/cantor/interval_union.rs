use rayon::prelude::*;
use serde::Serialize;

use crate::numeric::rational::to_f64;
use crate::numeric::surd::rat_decimal;
use crate::numeric::{Rat, RatInterval};
use num_traits::Zero;

/// Finite union of disjoint closed intervals, sorted, with exact endpoints.
#[derive(Clone, Debug, PartialEq, Eq, Default, Serialize)]
pub struct IntervalUnion {
    parts: Vec<RatInterval>,
}

impl IntervalUnion {
    pub fn empty() -> Self {
        Self::default()
    }

    /// Union of arbitrary closed intervals; overlapping or touching pieces merge.
    pub fn from_intervals(mut v: Vec<RatInterval>) -> Self {
        v.par_sort_unstable_by(|a, b| a.lo.cmp(&b.lo));
        let mut parts: Vec<RatInterval> = Vec::with_capacity(v.len());
        for iv in v {
            match parts.last_mut() {
                Some(last) if iv.lo <= last.hi => {
                    if iv.hi > last.hi {
                        last.hi = iv.hi;
                    }
                }
                _ => parts.push(iv),
            }
        }
        Self { parts }
    }

    pub fn parts(&self) -> &[RatInterval] {
        &self.parts
    }

    pub fn len(&self) -> usize {
        self.parts.len()
    }

    pub fn is_empty(&self) -> bool {
        self.parts.is_empty()
    }

    /// Exact total length.
    pub fn length(&self) -> Rat {
        self.parts.iter().fold(Rat::zero(), |acc, p| acc + p.width())
    }

    pub fn hull(&self) -> Option<RatInterval> {
        Some(RatInterval::new(self.parts.first()?.lo.clone(), self.parts.last()?.hi.clone()))
    }

    /// Bounded complementary intervals, as open intervals given by their closures.
    pub fn gaps(&self) -> Vec<RatInterval> {
        self.parts.windows(2).map(|w| RatInterval::new(w[0].hi.clone(), w[1].lo.clone())).collect()
    }

    pub fn contains_point(&self, x: &Rat) -> bool {
        let i = self.parts.partition_point(|p| p.hi < *x);
        i < self.parts.len() && self.parts[i].lo <= *x
    }

    /// Whether `iv` lies inside a single component.
    pub fn covers(&self, iv: &RatInterval) -> bool {
        let i = self.parts.partition_point(|p| p.hi < iv.lo);
        i < self.parts.len() && self.parts[i].contains_interval(iv)
    }

    pub fn is_subset_of(&self, other: &IntervalUnion) -> bool {
        self.parts.iter().all(|p| other.covers(p))
    }

    /// `{x + y : x in self, y in other}`.
    pub fn minkowski_sum(&self, other: &IntervalUnion) -> IntervalUnion {
        let v: Vec<RatInterval> =
            self.parts.par_iter().flat_map_iter(|a| other.parts.iter().map(move |b| a.add(b))).collect();
        Self::from_intervals(v)
    }

    pub fn scale(&self, k: &Rat) -> IntervalUnion {
        Self::from_intervals(self.parts.iter().map(|p| p.scale(k)).collect())
    }

    pub fn shift(&self, c: &Rat) -> IntervalUnion {
        Self { parts: self.parts.iter().map(|p| p.shift(c)).collect() }
    }

    pub fn neg(&self) -> IntervalUnion {
        Self { parts: self.parts.iter().rev().map(|p| p.neg()).collect() }
    }

    /// CSV with exact fractions and decimals: `lo,hi,lo_decimal,hi_decimal`.
    pub fn to_csv(&self) -> String {
        let mut s = String::from("lo,hi,lo_decimal,hi_decimal\n");
        for p in &self.parts {
            s.push_str(&format!("{},{},{},{}\n", p.lo, p.hi, rat_decimal(&p.lo), rat_decimal(&p.hi)));
        }
        s
    }

    pub fn to_f64_pairs(&self) -> Vec<(f64, f64)> {
        self.parts.iter().map(|p| (to_f64(&p.lo), to_f64(&p.hi))).collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numeric::rational::rat;

    fn iv(a: i64, b: i64, d: i64) -> RatInterval {
        RatInterval::new(rat(a, d), rat(b, d))
    }

    #[test]
    fn merges_and_measures() {
        let u = IntervalUnion::from_intervals(vec![iv(2, 3, 4), iv(0, 1, 4), iv(1, 2, 4), iv(7, 8, 8)]);
        assert_eq!(u.parts(), &[iv(0, 3, 4), iv(7, 8, 8)]);
        assert_eq!(u.length(), rat(7, 8));
        assert_eq!(u.gaps(), vec![iv(6, 7, 8)]);
        assert!(u.contains_point(&rat(1, 2)));
        assert!(!u.contains_point(&rat(13, 16)));
    }

    #[test]
    fn middle_thirds_sum_to_interval() {
        let k = IntervalUnion::from_intervals(vec![iv(0, 1, 3), iv(2, 3, 3)]);
        let s = k.minkowski_sum(&k);
        assert_eq!(s.parts(), &[iv(0, 6, 3)]);
        assert_eq!(k.neg().parts(), &[iv(-3, -2, 3), iv(-1, 0, 3)]);
    }

    #[test]
    fn csv_has_both_forms() {
        let csv = IntervalUnion::from_intervals(vec![iv(1, 2, 3)]).to_csv();
        assert!(csv.lines().nth(1).unwrap().starts_with("1/3,2/3,0.333"));
    }
}
