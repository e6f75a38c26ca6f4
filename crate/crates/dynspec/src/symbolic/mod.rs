//! Subshifts of finite type and their eventually periodic points.

pub mod matrix;
pub mod periodic;
pub mod random;
pub mod recode;
pub mod sequence;

pub use matrix::TransitionMatrix;
pub use periodic::{admissible_words, enumerate_periodic};
pub use random::random_eventually_periodic;
pub use recode::{higher_block, remove_cylinder, Cylinder, Recoded};
pub use sequence::{bracket, metric_distance, SymbolicSequence};

use crate::error::Result;

/// A word known to be admissible for some transition matrix.
#[derive(Clone, Debug, PartialEq, Eq, Hash, serde::Serialize)]
pub struct FiniteWord(Vec<usize>);

impl FiniteWord {
    pub fn new(symbols: Vec<usize>, b: &TransitionMatrix) -> Result<Self> {
        if symbols.is_empty() {
            return Err(crate::error::Error::Input("words have length at least one".into()));
        }
        b.check_admissible(&symbols, "word")?;
        Ok(Self(symbols))
    }

    pub fn symbols(&self) -> &[usize] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }
}

/// A sequence available symbol by symbol; once emitted, a position never changes.
pub trait LazySequence {
    fn symbol_at(&self, i: i64) -> usize;

    fn window(&self, lo: i64, hi: i64) -> Vec<usize> {
        (lo..=hi).map(|i| self.symbol_at(i)).collect()
    }
}

impl LazySequence for SymbolicSequence {
    fn symbol_at(&self, i: i64) -> usize {
        self.at(i)
    }
}

pub fn is_admissible(word: &[usize], b: &TransitionMatrix) -> Result<bool> {
    b.is_admissible(word)
}

pub fn count_paths(b: &TransitionMatrix, x: usize, y: usize, n: usize) -> Result<num_bigint::BigUint> {
    b.count_paths(x, y, n)
}

pub fn connecting_word(b: &TransitionMatrix, x: usize, y: usize) -> Result<Vec<usize>> {
    b.connecting_word(x, y)
}
