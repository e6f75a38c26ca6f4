use serde::{Deserialize, Serialize};

use crate::numeric::rational::int;
use crate::numeric::{Mobius, QuadSurd};
use crate::symbolic::SymbolicSequence;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Side {
    /// `[x_0; x_1, x_2, ...]`.
    Positive,
    /// `[0; x_{-1}, x_{-2}, ...]`.
    Negative,
}

/// `x -> [d_0; d_1, ..., d_{k-1}, x]`.
pub fn digits_map(digits: &[u64]) -> Mobius {
    digits.iter().fold(Mobius::identity(), |m, &d| m.compose(&Mobius::cf_digit(d)))
}

/// `[p_1; ..., p_k, p_1, ...]`, the value of a purely periodic expansion.
pub fn periodic_value(period: &[u64]) -> QuadSurd {
    assert!(!period.is_empty() && period.iter().all(|&d| d >= 1), "digits must be positive");
    let m = digits_map(period);
    m.fixed_points().into_iter().find(|p| *p > QuadSurd::rational(int(1))).expect("value exceeds one")
}

/// `[prefix; period period ...]`, or the terminating `[prefix]` when `period` is empty.
pub fn cf_digits_value(prefix: &[u64], period: &[u64]) -> QuadSurd {
    assert!(prefix.iter().all(|&d| d >= 1), "digits must be positive");
    if period.is_empty() {
        let (last, head) = prefix.split_last().expect("some digits");
        return digits_map(head).apply_surd(&QuadSurd::rational(int(*last as i64)));
    }
    digits_map(prefix).apply_surd(&periodic_value(period))
}

/// One-sided continued-fraction value read off an eventually periodic sequence.
pub fn cf_value(x: &SymbolicSequence, digit: impl Fn(usize) -> u64, side: Side) -> QuadSurd {
    let d = |w: &[usize]| w.iter().map(|&a| digit(a)).collect::<Vec<u64>>();
    match side {
        Side::Positive => {
            let (seg, per) = x.right_part(0);
            cf_digits_value(&d(&seg), &d(&per))
        }
        Side::Negative => {
            let (per, seg) = x.left_part(-1);
            let mut seg = d(&seg);
            seg.reverse();
            let mut per = d(&per);
            per.reverse();
            cf_digits_value(&seg, &per).recip()
        }
    }
}
