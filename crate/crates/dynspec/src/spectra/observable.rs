use std::collections::HashMap;
use std::fmt;
use std::sync::Arc;

use num_traits::{One, Zero};
use serde_json::{json, Value};

use crate::cantor::cf::{cf_value, digits_map, Side};
use crate::error::{Error, Result};
use crate::numeric::rational::{self, int};
use crate::numeric::{Rat, RatInterval, SurdSum};
use crate::symbolic::{admissible_words, SymbolicSequence, TransitionMatrix};

/// An observable given by the horseshoe chart, evaluated exactly on eventually periodic points.
pub trait SequenceObservable: Send + Sync + fmt::Debug {
    fn eval_exact(&self, x: &SymbolicSequence) -> Rat;
    /// Enclosure of the value at any point whose symbols on `[-r, r]` are `window` (`len = 2r + 1`).
    fn eval_window(&self, window: &[usize]) -> RatInterval;
    /// Whether the value is monotone in each chart coordinate, which makes tail sups exact.
    fn monotone(&self) -> bool;
    fn matrix(&self) -> &TransitionMatrix;
    fn describe(&self) -> Value;
    /// Bound on `|F(x) - F(y)|` when `x` and `y` agree on `[-n, n]`.
    fn modulus(&self, _n: usize) -> Option<Rat> {
        None
    }
}

/// A function on sequence space.
#[derive(Clone, Debug)]
pub enum ShiftObservable {
    /// Depends only on the symbols in positions `[-radius, radius]`.
    Table(LocalTable),
    /// `[x_0; x_1, ...] + [0; x_{-1}, x_{-2}, ...]`, letter `a` standing for digit `digits[a]`.
    ContinuedFraction { digits: Vec<u64> },
    Geometric(Arc<dyn SequenceObservable>),
}

#[derive(Clone, Debug)]
pub struct LocalTable {
    pub radius: usize,
    values: HashMap<Vec<usize>, Rat>,
}

impl LocalTable {
    /// Table with a value for every admissible window of width `2 radius + 1`.
    pub fn new(b: &TransitionMatrix, radius: usize, values: HashMap<Vec<usize>, Rat>) -> Result<Self> {
        for w in admissible_words(b, 2 * radius + 1) {
            if !values.contains_key(&w) {
                return Err(Error::Input(format!("observable table has no value for window {w:?}")));
            }
        }
        Ok(Self { radius, values })
    }

    pub fn from_fn(b: &TransitionMatrix, radius: usize, f: impl Fn(&[usize]) -> Rat) -> Self {
        let values = admissible_words(b, 2 * radius + 1).into_iter().map(|w| {
            let v = f(&w);
            (w, v)
        });
        Self { radius, values: values.collect() }
    }

    pub fn value(&self, window: &[usize]) -> Rat {
        self.values.get(window).cloned().unwrap_or_else(|| panic!("window {window:?} not in table"))
    }

    pub fn entries(&self) -> impl Iterator<Item = (&Vec<usize>, &Rat)> {
        self.values.iter()
    }
}

impl ShiftObservable {
    /// Value of the letter at position 0.
    pub fn coordinate(b: &TransitionMatrix, letter_values: &[Rat]) -> Self {
        ShiftObservable::Table(LocalTable::from_fn(b, 0, |w| letter_values[w[0]].clone()))
    }

    pub fn continued_fraction(digits: Vec<u64>) -> Result<Self> {
        if digits.is_empty() || digits.contains(&0) {
            return Err(Error::Input("continued-fraction digits must be positive".into()));
        }
        Ok(ShiftObservable::ContinuedFraction { digits })
    }

    /// Radius beyond which the value is not determined exactly by a window.
    pub fn radius(&self) -> usize {
        match self {
            ShiftObservable::Table(t) => t.radius,
            _ => 0,
        }
    }

    pub fn is_exact_on_windows(&self) -> bool {
        matches!(self, ShiftObservable::Table(_))
    }

    /// Exact value at position 0.
    pub fn eval(&self, x: &SymbolicSequence) -> SurdSum {
        match self {
            ShiftObservable::Table(t) => {
                let r = t.radius as i64;
                SurdSum::from(t.value(&x.window(-r, r)))
            }
            ShiftObservable::ContinuedFraction { digits } => {
                let d = |a: usize| digits[a];
                let p = cf_value(x, d, Side::Positive);
                let n = cf_value(x, d, Side::Negative);
                SurdSum::from(p).add(&SurdSum::from(n))
            }
            ShiftObservable::Geometric(g) => SurdSum::from(g.eval_exact(x)),
        }
    }

    /// Enclosure of the value at any point whose symbols on `[-r, r]` are `window`.
    pub fn eval_window(&self, window: &[usize]) -> RatInterval {
        assert!(window.len() % 2 == 1, "windows are centered");
        let r = window.len() / 2;
        match self {
            ShiftObservable::Table(t) => {
                assert!(r >= t.radius, "window narrower than the table radius");
                let w = &window[r - t.radius..=r + t.radius];
                RatInterval::point(t.value(w))
            }
            ShiftObservable::ContinuedFraction { digits } => {
                let dmax = *digits.iter().max().unwrap() as i64;
                let tail = RatInterval::new(int(1), int(dmax + 1));
                let fwd: Vec<u64> = window[r..].iter().map(|&a| digits[a]).collect();
                let back: Vec<u64> = window[..r].iter().rev().map(|&a| digits[a]).collect();
                let alpha = digits_map(&fwd).apply_interval(&tail);
                let beta = if back.is_empty() {
                    RatInterval::new(Rat::zero(), Rat::one())
                } else {
                    let b = digits_map(&back).apply_interval(&tail);
                    RatInterval::new(Rat::one() / &b.hi, Rat::one() / &b.lo)
                };
                alpha.add(&beta)
            }
            ShiftObservable::Geometric(g) => g.eval_window(window),
        }
    }

    /// Whether sups along tails are attained or approached monotonically (see `markov_value`).
    pub fn monotone_tails(&self) -> bool {
        match self {
            ShiftObservable::Geometric(g) => g.monotone(),
            _ => true,
        }
    }

    /// Bound on `|f(x) - f(y)|` when `x` and `y` agree on `[-n, n]`, if one is known in closed form.
    pub fn modulus(&self, n: usize) -> Option<Rat> {
        match self {
            ShiftObservable::Table(t) => Some(if n >= t.radius { Rat::zero() } else { Rat::one() }),
            ShiftObservable::ContinuedFraction { .. } => {
                let (mut a, mut b) = (Rat::one(), Rat::one());
                for _ in 1..=n {
                    let c = &a + &b;
                    a = b;
                    b = c;
                }
                Some(int(2) / (&b * &b))
            }
            ShiftObservable::Geometric(g) => g.modulus(n),
        }
    }

    pub fn to_json(&self) -> Value {
        match self {
            ShiftObservable::Table(t) => {
                let mut rows: Vec<(&Vec<usize>, &Rat)> = t.values.iter().collect();
                rows.sort();
                json!({
                    "type": "table",
                    "radius": t.radius,
                    "values": rows.iter().map(|(w, v)| json!({"window": w, "value": v.to_string()})).collect::<Vec<_>>(),
                })
            }
            ShiftObservable::ContinuedFraction { digits } => json!({"type": "cf", "digits": digits}),
            ShiftObservable::Geometric(g) => g.describe(),
        }
    }

    /// Parses `{"type": "table", ...}`, `{"type": "cf", "digits": [...]}` or
    /// `{"type": "coordinate", "values": [...]}`.
    pub fn from_json(v: &Value, b: &TransitionMatrix) -> Result<Self> {
        let bad = |m: &str| Error::Input(format!("observable JSON: {m}"));
        let num = |x: &Value| -> Result<Rat> {
            rational::parse(x.as_str().map(str::to_string).unwrap_or_else(|| x.to_string()).as_str())
        };
        match v.get("type").and_then(Value::as_str) {
            Some("cf") => {
                let d = v["digits"]
                    .as_array()
                    .ok_or_else(|| bad("digits"))?
                    .iter()
                    .map(|x| x.as_u64().ok_or_else(|| bad("digits")))
                    .collect::<Result<Vec<_>>>()?;
                if d.len() != b.size() {
                    return Err(bad("one digit per letter"));
                }
                Self::continued_fraction(d)
            }
            Some("coordinate") => {
                let vals = v["values"].as_array().ok_or_else(|| bad("values"))?.iter().map(num).collect::<Result<Vec<_>>>()?;
                if vals.len() != b.size() {
                    return Err(bad("one value per letter"));
                }
                Ok(Self::coordinate(b, &vals))
            }
            Some("table") => {
                let radius = v["radius"].as_u64().ok_or_else(|| bad("radius"))? as usize;
                let mut values = HashMap::new();
                for row in v["values"].as_array().ok_or_else(|| bad("values"))? {
                    let w: Vec<usize> = serde_json::from_value(row["window"].clone()).map_err(|_| bad("window"))?;
                    if w.len() != 2 * radius + 1 {
                        return Err(bad("window width"));
                    }
                    values.insert(w, num(&row["value"])?);
                }
                Ok(ShiftObservable::Table(LocalTable::new(b, radius, values)?))
            }
            _ => Err(bad("type must be table, cf or coordinate")),
        }
    }
}

/// `x -> [d_0; d_1, ..., x]` on the tail range, as used by interval enclosures.
pub fn cf_prefix_enclosure(digits: &[u64], dmax: u64) -> RatInterval {
    let tail = RatInterval::new(int(1), int(dmax as i64 + 1));
    if digits.is_empty() {
        return tail;
    }
    digits_map(digits).apply_interval(&tail)
}
