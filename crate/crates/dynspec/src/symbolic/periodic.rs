use super::matrix::TransitionMatrix;
use super::sequence::SymbolicSequence;

fn is_least_rotation_primitive(w: &[usize]) -> bool {
    let n = w.len();
    (1..n).all(|r| {
        let rotated = w[r..].iter().chain(&w[..r]);
        // strictly smaller than every proper rotation means minimal and primitive
        w.iter().lt(rotated)
    })
}

/// One representative per periodic orbit of least period `<= max_period`,
/// ordered by period and then lexicographically by the least rotation.
pub fn enumerate_periodic(b: &TransitionMatrix, max_period: usize) -> Vec<SymbolicSequence> {
    let mut out = Vec::new();
    for n in 1..=max_period {
        for w in cycles_of_length(b, n) {
            if is_least_rotation_primitive(&w) {
                out.push(SymbolicSequence::periodic(&w));
            }
        }
    }
    out
}

/// Words `w` of length `n` with `w` cyclically admissible, in lexicographic order.
pub fn cycles_of_length(b: &TransitionMatrix, n: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    let mut w = Vec::with_capacity(n);
    for first in 0..b.size() {
        w.clear();
        w.push(first);
        extend(b, n, &mut w, &mut out);
    }
    out
}

fn extend(b: &TransitionMatrix, n: usize, w: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
    if w.len() == n {
        if b.allowed(*w.last().unwrap(), w[0]) {
            out.push(w.clone());
        }
        return;
    }
    let last = *w.last().unwrap();
    for s in 0..b.size() {
        // least-rotation representatives never contain a letter below the first
        if b.allowed(last, s) && s >= w[0] {
            w.push(s);
            extend(b, n, w, out);
            w.pop();
        }
    }
}

/// All admissible words of the given length, in lexicographic order.
pub fn admissible_words(b: &TransitionMatrix, len: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    if len == 0 {
        return out;
    }
    let mut w = Vec::with_capacity(len);
    fn go(b: &TransitionMatrix, len: usize, w: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if w.len() == len {
            out.push(w.clone());
            return;
        }
        for s in 0..b.size() {
            if w.last().is_none_or(|&l| b.allowed(l, s)) {
                w.push(s);
                go(b, len, w, out);
                w.pop();
            }
        }
    }
    go(b, len, &mut w, &mut out);
    out
}
