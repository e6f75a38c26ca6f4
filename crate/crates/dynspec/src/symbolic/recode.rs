use serde::Serialize;

use super::matrix::TransitionMatrix;
use super::periodic::admissible_words;
use super::sequence::SymbolicSequence;
use crate::error::{Error, Result};

/// Cylinder `{x : x_{start+i} = word[i]}`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize)]
pub struct Cylinder {
    pub word: Vec<usize>,
    pub start: i64,
}

impl Cylinder {
    pub fn new(word: Vec<usize>, start: i64) -> Result<Self> {
        if word.is_empty() {
            return Err(Error::Input("empty cylinder word".into()));
        }
        Ok(Self { word, start })
    }

    /// Cylinder over positions `[-s, s]`; the word must have odd length `2s+1`.
    pub fn centered(word: Vec<usize>) -> Result<Self> {
        if word.len() % 2 == 0 {
            return Err(Error::Input("centered cylinder needs odd width".into()));
        }
        let s = (word.len() / 2) as i64;
        Self::new(word, -s)
    }

    pub fn half_width(&self) -> Option<usize> {
        (self.word.len() % 2 == 1 && self.start == -((self.word.len() / 2) as i64))
            .then_some(self.word.len() / 2)
    }

    pub fn contains(&self, x: &SymbolicSequence) -> bool {
        self.word.iter().enumerate().all(|(i, &a)| x.at(self.start + i as i64) == a)
    }

    /// Nonempty in `Σ_B` iff admissible (every letter has a predecessor and a successor).
    pub fn is_nonempty(&self, b: &TransitionMatrix) -> Result<bool> {
        b.is_admissible(&self.word)
    }
}

/// A higher-block presentation: letter `i` stands for the original word `words[i]`.
#[derive(Clone, Debug, Serialize)]
pub struct Recoded {
    pub width: usize,
    pub words: Vec<Vec<usize>>,
    #[serde(skip)]
    pub matrix: Option<TransitionMatrix>,
}

impl Recoded {
    pub fn is_empty(&self) -> bool {
        self.matrix.is_none()
    }

    /// Original symbol carried by a recoded letter at the given index inside its block.
    pub fn symbol(&self, letter: usize, index: usize) -> usize {
        self.words[letter][index]
    }

    /// Image of a recoded sequence under the block map reading index `index` of each letter.
    pub fn decode(&self, x: &SymbolicSequence, index: usize) -> SymbolicSequence {
        let m = |w: &[usize]| w.iter().map(|&a| self.words[a][index]).collect::<Vec<_>>();
        SymbolicSequence::new(m(x.left_period()), m(x.core()), m(x.right_period()), x.offset())
            .expect("nonempty tails")
    }

    pub fn letter_of(&self, word: &[usize]) -> Option<usize> {
        self.words.iter().position(|w| w == word)
    }
}

/// Higher-block recoding of width `width`, omitting the words in `forbidden`,
/// then iteratively pruning letters without successor or predecessor.
pub fn higher_block(b: &TransitionMatrix, width: usize, forbidden: &[Vec<usize>]) -> Recoded {
    assert!(width >= 1);
    let mut words: Vec<Vec<usize>> = admissible_words(b, width)
        .into_iter()
        .filter(|w| !forbidden.iter().any(|f| contains_block(w, f)))
        .collect();
    loop {
        let n = words.len();
        let overlap = |u: &[usize], v: &[usize]| u[1..] == v[..width - 1] && b.allowed(u[width - 1], v[width - 1]);
        let adj: Vec<Vec<bool>> =
            words.iter().map(|u| words.iter().map(|v| overlap(u, v)).collect()).collect();
        let keep: Vec<bool> = (0..n)
            .map(|i| adj[i].iter().any(|&x| x) && (0..n).any(|j| adj[j][i]))
            .collect();
        if keep.iter().all(|&k| k) {
            let matrix = if n == 0 { None } else { Some(TransitionMatrix::new(adj).expect("pruned")) };
            return Recoded { width, words, matrix };
        }
        words = words.into_iter().zip(keep).filter_map(|(w, k)| k.then_some(w)).collect();
    }
}

fn contains_block(w: &[usize], f: &[usize]) -> bool {
    f.len() <= w.len() && w.windows(f.len()).any(|s| s == f)
}

/// Recodes `Σ_B` minus every shift of the centered cylinder `q` as an SFT on
/// words of width `2s+1`; a letter's symbol at position 0 is its middle entry.
pub fn remove_cylinder(b: &TransitionMatrix, q: &Cylinder) -> Result<Recoded> {
    if q.half_width().is_none() {
        return Err(Error::Input("remove_cylinder expects a centered cylinder".into()));
    }
    b.check_admissible(&q.word, "cylinder")?;
    Ok(higher_block(b, q.word.len(), std::slice::from_ref(&q.word)))
}
