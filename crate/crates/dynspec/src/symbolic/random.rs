use rand::seq::IteratorRandom;
use rand::Rng;

use super::{SymbolicSequence, TransitionMatrix};

fn step<R: Rng>(rng: &mut R, b: &TransitionMatrix, from: usize) -> usize {
    b.successors(from).choose(rng).expect("irreducible matrices have successors")
}

fn cycle_from<R: Rng>(rng: &mut R, b: &TransitionMatrix, start: usize, len: usize) -> Vec<usize> {
    let mut w = vec![start];
    while w.len() < len {
        let next = step(rng, b, *w.last().unwrap());
        w.push(next);
    }
    w.extend(b.connecting_word(*w.last().unwrap(), start).expect("irreducible"));
    w
}

/// A random admissible eventually periodic point: periods of length at least
/// `1..=max_period` (more when closing a cycle needs it) and a core of `1..=max_core` symbols.
pub fn random_eventually_periodic<R: Rng>(rng: &mut R, b: &TransitionMatrix, max_core: usize, max_period: usize) -> SymbolicSequence {
    let s = rng.gen_range(0..b.size());
    let p = rng.gen_range(1..=max_period.max(1));
    let left = cycle_from(rng, b, s, p);
    let mut core = vec![step(rng, b, *left.last().unwrap())];
    let len = rng.gen_range(1..=max_core.max(1));
    while core.len() < len {
        let next = step(rng, b, *core.last().unwrap());
        core.push(next);
    }
    let r0 = step(rng, b, *core.last().unwrap());
    let q = rng.gen_range(1..=max_period.max(1));
    let right = cycle_from(rng, b, r0, q);
    let offset = rng.gen_range(0..core.len()) as i64;
    SymbolicSequence::new(left, core, right, offset).expect("nonempty parts")
}
