use serde::Serialize;
use serde_json::Value;

use super::observable::ShiftObservable;
use super::values::{markov_value, Attained};
use crate::error::{Error, Result};
use crate::numeric::surd::rat_decimal;
use crate::numeric::{Rat, RatInterval, SurdSum};
use crate::symbolic::{LazySequence, SymbolicSequence, TransitionMatrix};

/// Shape of the maximizing point `x_M` around which blocks are spliced.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum MaxPoint {
    /// `x_M = (… b b c_1 … c_l a a …)` with `c_t` at position 0 (`t` counted from 1).
    Heteroclinic { b: Vec<usize>, c: Vec<usize>, a: Vec<usize>, t: usize },
    /// `x_M = (… a a a …)` with `a[0]` at position 0.
    Periodic { a: Vec<usize> },
}

#[derive(Clone, Debug, Serialize)]
pub struct SurgeryContext {
    #[serde(skip)]
    matrix: TransitionMatrix,
    pub max_point: MaxPoint,
    pub k: usize,
    pub alpha: Vec<usize>,
    /// Index into `alpha` of the symbol playing position 0 of `x_M`.
    pub alpha_zero: usize,
}

impl SurgeryContext {
    pub fn heteroclinic(matrix: &TransitionMatrix, b: Vec<usize>, c: Vec<usize>, a: Vec<usize>, t: usize) -> Result<Self> {
        if c.is_empty() || t == 0 || t > c.len() {
            return Err(Error::Input(format!("need 1 <= t <= |c| = {}", c.len())));
        }
        Self::build(matrix, MaxPoint::Heteroclinic { b, c, a, t }, None)
    }

    pub fn periodic(matrix: &TransitionMatrix, a: Vec<usize>) -> Result<Self> {
        Self::build(matrix, MaxPoint::Periodic { a }, None)
    }

    /// Same context with `k` repetitions of each periodic block.
    pub fn with_k(&self, k: usize) -> Result<Self> {
        Self::build(&self.matrix, self.max_point.clone(), Some(k))
    }

    fn build(matrix: &TransitionMatrix, max_point: MaxPoint, k: Option<usize>) -> Result<Self> {
        let conn = matrix
            .max_connecting_length()
            .ok_or_else(|| Error::Input("transition matrix is not irreducible".into()))?;
        let k = k.unwrap_or(conn + 1);
        if k == 0 {
            return Err(Error::Input("k must be positive".into()));
        }
        let cyc = |w: &[usize], name: &str| -> Result<()> {
            if w.is_empty() || !matrix.is_cycle(w) {
                return Err(Error::Input(format!("{name} must be a nonempty admissible cycle")));
            }
            Ok(())
        };
        let (alpha, alpha_zero) = match &max_point {
            MaxPoint::Heteroclinic { b, c, a, t } => {
                cyc(b, "b")?;
                cyc(a, "a")?;
                let mut w = b.repeat(k);
                let zero = w.len() + t - 1;
                w.extend_from_slice(c);
                w.extend(a.repeat(k));
                (w, zero)
            }
            MaxPoint::Periodic { a } => {
                cyc(a, "a")?;
                (a.repeat(k), (k / 2) * a.len())
            }
        };
        matrix.check_admissible(&alpha, "alpha block")?;
        Ok(Self { matrix: matrix.clone(), max_point, k, alpha, alpha_zero })
    }

    pub fn matrix(&self) -> &TransitionMatrix {
        &self.matrix
    }

    pub fn x_max(&self) -> SymbolicSequence {
        match &self.max_point {
            MaxPoint::Heteroclinic { b, c, a, t } => {
                SymbolicSequence::new(b.clone(), c.clone(), a.clone(), *t as i64 - 1).expect("nonempty tails")
            }
            MaxPoint::Periodic { a } => SymbolicSequence::periodic(a),
        }
    }

    /// Connectors `x_0 -> alpha` and `alpha -> x_1`, checked against the length condition.
    fn connectors(&self, x0: usize, x1: usize) -> Result<(Vec<usize>, Vec<usize>)> {
        let e = self.matrix.connecting_word(x0, self.alpha[0])?;
        let f = self.matrix.connecting_word(*self.alpha.last().unwrap(), x1)?;
        if e.len() >= self.alpha.len() || f.len() >= self.alpha.len() {
            return Err(Error::Surgery { junction: format!("connector longer than alpha block (k = {})", self.k) });
        }
        Ok((e, f))
    }

    pub fn from_json(v: &Value, matrix: &TransitionMatrix) -> Result<Self> {
        let bad = |m: &str| Error::Input(format!("surgery context JSON: {m}"));
        let word = |key: &str| -> Result<Vec<usize>> {
            serde_json::from_value(v[key].clone()).map_err(|_| bad(key))
        };
        let ctx = match v.get("kind").and_then(Value::as_str) {
            Some("periodic") => Self::periodic(matrix, word("a")?)?,
            Some("heteroclinic") | None => {
                let t = v["t"].as_u64().ok_or_else(|| bad("t"))? as usize;
                Self::heteroclinic(matrix, word("b")?, word("c")?, word("a")?, t)?
            }
            Some(other) => return Err(bad(&format!("unknown kind {other}"))),
        };
        match v.get("k").and_then(Value::as_u64) {
            Some(k) => ctx.with_k(k as usize),
            None => Ok(ctx),
        }
    }
}

fn same_cycle(u: &[usize], v: &[usize]) -> bool {
    u.len() == v.len() && (0..u.len()).any(|r| u[r..].iter().chain(&u[..r]).eq(v.iter()))
}

fn check_spliced(b: &TransitionMatrix, y: &SymbolicSequence, x: &SymbolicSequence) -> Result<()> {
    y.check_admissible(b).map_err(|e| Error::Surgery { junction: e.to_string() })?;
    if !same_cycle(y.left_period(), x.left_period()) || !same_cycle(y.right_period(), x.right_period()) {
        return Err(Error::Surgery { junction: "tails changed".into() });
    }
    Ok(())
}

/// `A(x) = (…, x_{-1}, x_0, e, alpha, f, x_1, …)` with the alpha block's designated symbol at position 0.
pub fn surgery_a(x: &SymbolicSequence, ctx: &SurgeryContext) -> Result<SymbolicSequence> {
    x.check_admissible(&ctx.matrix)?;
    let (e, f) = ctx.connectors(x.at(0), x.at(1))?;
    let mut middle = e.clone();
    middle.extend_from_slice(&ctx.alpha);
    middle.extend_from_slice(&f);
    let y = x.splice(0, &middle, x, 1, (e.len() + ctx.alpha_zero) as i64);
    check_spliced(&ctx.matrix, &y, x)?;
    Ok(y)
}

#[derive(Clone, Debug, Serialize)]
pub struct SupCertificate {
    pub holds: bool,
    pub value_at_zero: SurdSum,
    pub sup: SurdSum,
    /// Shifts of `A(x)` where the sup is attained; empty when only approached along a tail.
    pub achieving: Vec<i64>,
    /// For a periodic `x_M`: the attaining shift inside the spliced block.
    pub block_shift: Option<i64>,
    /// Whether the alpha block alone fills the observable's window at position 0.
    pub block_covers_window: bool,
    pub spliced: SymbolicSequence,
}

/// Checks `sup_n f(σ^n A(x)) = f(A(x))`, or for periodic `x_M` that the sup is
/// attained at a shift inside the spliced block.
pub fn verify_sup_identity(f: &ShiftObservable, x: &SymbolicSequence, ctx: &SurgeryContext) -> Result<SupCertificate> {
    let y = surgery_a(x, ctx)?;
    let v0 = f.eval(&y);
    let m = markov_value(f, &y)?;
    let achieving = match &m.attained {
        Attained::Positions { shifts } => shifts.clone(),
        Attained::Limit { .. } => vec![],
    };
    let (holds, block_shift) = match ctx.max_point {
        MaxPoint::Heteroclinic { .. } => (m.value == v0, None),
        MaxPoint::Periodic { .. } => {
            let lo = -(ctx.alpha_zero as i64);
            let hi = lo + ctx.alpha.len() as i64 - 1;
            let p = achieving.iter().copied().filter(|p| (lo..=hi).contains(p)).min_by_key(|p| p.abs());
            (p.is_some(), p)
        }
    };
    let r = f.radius();
    let block_covers_window = ctx.alpha_zero >= r && ctx.alpha.len() - ctx.alpha_zero > r;
    Ok(SupCertificate { holds, value_at_zero: v0, sup: m.value, achieving, block_shift, block_covers_window, spliced: y })
}

/// `A_1(x) = ⋯ G_3 G_2 G_1 | G_1 G_2 G_3 ⋯` with `G_i = (x_1..x_i, E_i, x_{-i}..x_0, β)`,
/// `β = e alpha f` and `E_i` connecting `x_i` to `x_{-i}`. Position 0 is the start of the right `G_1`.
#[derive(Clone, Debug)]
pub struct SurgeryA1 {
    x: SymbolicSequence,
    beta: Vec<usize>,
    beta_zero: usize,
    connectors: Vec<Vec<Vec<usize>>>,
}

impl SurgeryA1 {
    pub fn new(x: &SymbolicSequence, ctx: &SurgeryContext) -> Result<Self> {
        x.check_admissible(&ctx.matrix)?;
        let (e, f) = ctx.connectors(x.at(0), x.at(1))?;
        let n = ctx.matrix.size();
        let mut connectors = vec![vec![vec![]; n]; n];
        for (i, row) in connectors.iter_mut().enumerate() {
            for (j, w) in row.iter_mut().enumerate() {
                *w = ctx.matrix.connecting_word(i, j)?;
                if w.len() >= ctx.alpha.len() {
                    return Err(Error::Surgery { junction: format!("connector {i}->{j} longer than alpha block") });
                }
            }
        }
        let mut beta = e.clone();
        beta.extend_from_slice(&ctx.alpha);
        beta.extend_from_slice(&f);
        Ok(Self { x: x.clone(), beta, beta_zero: e.len() + ctx.alpha_zero, connectors })
    }

    fn connector(&self, i: usize) -> &[usize] {
        &self.connectors[self.x.at(i as i64)][self.x.at(-(i as i64))]
    }

    fn block_len(&self, i: usize) -> usize {
        2 * i + 1 + self.connector(i).len() + self.beta.len()
    }

    fn block_symbol(&self, i: usize, j: usize) -> usize {
        let e = self.connector(i);
        if j < i {
            return self.x.at(j as i64 + 1);
        }
        let j = j - i;
        if j < e.len() {
            return e[j];
        }
        let j = j - e.len();
        if j <= i {
            return self.x.at(j as i64 - i as i64);
        }
        self.beta[j - i - 1]
    }

    /// Position of the alpha block's designated symbol inside the right-hand `G_i`.
    pub fn beta_center(&self, i: usize) -> i64 {
        let start: usize = (1..i).map(|j| self.block_len(j)).sum();
        (start + self.block_len(i) - self.beta.len() + self.beta_zero) as i64
    }
}

impl LazySequence for SurgeryA1 {
    fn symbol_at(&self, p: i64) -> usize {
        let (mut q, right) = if p >= 0 { (p as usize, true) } else { ((-p - 1) as usize, false) };
        let mut i = 1;
        loop {
            let len = self.block_len(i);
            if q < len {
                return self.block_symbol(i, if right { q } else { len - 1 - q });
            }
            q -= len;
            i += 1;
        }
    }
}

/// Symbols of `A_1(x)` on `[-horizon, horizon]`.
pub fn surgery_a1_prefix(x: &SymbolicSequence, ctx: &SurgeryContext, horizon: usize) -> Result<Vec<usize>> {
    let a1 = SurgeryA1::new(x, ctx)?;
    Ok(a1.window(-(horizon as i64), horizon as i64))
}

#[derive(Clone, Debug, Serialize)]
pub struct BlockRow {
    pub block: usize,
    pub position: i64,
    pub value_lo: String,
    pub value_hi: String,
    /// Upper bound on `|f(σ^n A_1(x)) - f(A(x))|` at this block.
    pub distance: f64,
    /// The a-priori bound from agreement on `[-block, block]`, when known.
    pub modulus: Option<f64>,
}

#[derive(Clone, Debug, Serialize)]
pub struct HorizonRow {
    pub horizon: usize,
    pub beta_sup_hi: String,
    pub other_sup_hi: String,
}

#[derive(Clone, Debug, Serialize)]
pub struct LimsupReport {
    pub holds: bool,
    pub target: SurdSum,
    pub blocks: Vec<BlockRow>,
    pub horizons: Vec<HorizonRow>,
}

/// Checks `limsup_n f(σ^n A_1(x)) = f(A(x))` along the alpha-block centers of `A_1(x)`.
///
/// Exact observables must hit the target exactly once blocks clear the window
/// radius, with every other position strictly below it. Other observables must
/// stay within their modulus of continuity of the target and converge.
pub fn verify_limsup_identity(
    f: &ShiftObservable,
    x: &SymbolicSequence,
    ctx: &SurgeryContext,
    horizons: &[usize],
) -> Result<LimsupReport> {
    let y = surgery_a(x, ctx)?;
    let target = f.eval(&y);
    let t = target.enclose(160);
    let a1 = SurgeryA1::new(x, ctx)?;
    let top = horizons.iter().copied().max().unwrap_or(0);
    let m = f.radius();
    let exact = f.is_exact_on_windows();
    let at = |n: i64, r: usize| f.eval_window(&a1.window(n - r as i64, n + r as i64));
    let dist = |e: &RatInterval| -> Rat {
        let a = &e.hi - &t.lo;
        let b = &t.hi - &e.lo;
        let d = if a > b { a } else { b };
        if d < Rat::from_integer(0.into()) { Rat::from_integer(0.into()) } else { d }
    };

    let mut blocks = Vec::new();
    let mut holds = true;
    let mut centers = Vec::new();
    for j in 1..=top {
        let n = a1.beta_center(j);
        centers.push(n);
        let e = at(n, j + m);
        let d = dist(&e);
        let modulus = f.modulus(j);
        if exact {
            if j >= m.max(1) && e.lo != t.lo {
                holds = false;
            }
        } else if let Some(md) = &modulus {
            if d > &e.width() + md {
                holds = false;
            }
        }
        blocks.push(BlockRow {
            block: j,
            position: n,
            value_lo: rat_decimal(&e.lo),
            value_hi: rat_decimal(&e.hi),
            distance: crate::numeric::rational::to_f64(&d),
            modulus: modulus.map(|r| crate::numeric::rational::to_f64(&r)),
        });
    }
    if !exact && blocks.len() >= 2 && blocks.last().unwrap().distance >= blocks[0].distance && blocks[0].distance > 0.0 {
        holds = false;
    }

    let mut rows = Vec::new();
    let start = centers.get(m.max(1) - 1).copied().unwrap_or(0);
    let r = top + m;
    let mut other: Option<Rat> = None;
    let mut beta: Option<Rat> = None;
    let mut p = start;
    let mut idx = m.max(1) - 1;
    for &h in {
        let mut hs = horizons.to_vec();
        hs.sort_unstable();
        hs
    }
    .iter()
    {
        let Some(&end) = centers.get(h.saturating_sub(1)) else { continue };
        while p <= end {
            let e = at(p, r);
            let slot = if centers.get(idx) == Some(&p) {
                idx += 1;
                &mut beta
            } else {
                &mut other
            };
            if slot.as_ref().map_or(true, |v| e.hi > *v) {
                *slot = Some(e.hi.clone());
            }
            p += 1;
        }
        if exact && other.as_ref().is_some_and(|o| *o > t.hi) {
            holds = false;
        }
        let show = |v: &Option<Rat>| v.as_ref().map(rat_decimal).unwrap_or_else(|| "-".into());
        rows.push(HorizonRow { horizon: h, beta_sup_hi: show(&beta), other_sup_hi: show(&other) });
    }
    Ok(LimsupReport { holds, target, blocks, horizons: rows })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numeric::rational::{int, rat};
    use crate::spectra::observable::LocalTable;

    fn seq(left: &[usize], core: &[usize], right: &[usize], offset: i64) -> SymbolicSequence {
        SymbolicSequence::new(left.to_vec(), core.to_vec(), right.to_vec(), offset).unwrap()
    }

    /// Strict max 2 at the centered window of `x_M = …0 0 1 1 0 0…`, other windows below 1.
    fn peaked(b: &TransitionMatrix, ctx: &SurgeryContext, m: usize) -> ShiftObservable {
        let top = ctx.x_max().window(-(m as i64), m as i64);
        ShiftObservable::Table(LocalTable::from_fn(b, m, |w| {
            if w == top.as_slice() {
                int(2)
            } else {
                rat(w.iter().enumerate().map(|(i, &a)| (a * (i + 3)) as i64).sum::<i64>() % 7, 7)
            }
        }))
    }

    #[test]
    fn single_letter_block_carries_the_max() {
        let b = TransitionMatrix::full(2);
        let ctx = SurgeryContext::periodic(&b, vec![1]).unwrap().with_k(1).unwrap();
        let f = ShiftObservable::coordinate(&b, &[int(0), int(1)]);
        let c = verify_sup_identity(&f, &SymbolicSequence::periodic(&[0]), &ctx).unwrap();
        assert!(c.holds);
        assert_eq!(c.block_shift, Some(0));
        assert_eq!(c.spliced.at(0), 1);
    }

    #[test]
    fn golden_mean_splice_inserts_connectors() {
        let b = TransitionMatrix::golden_mean();
        let one = (0..2).find(|&a| !b.allowed(a, a)).unwrap();
        let zero = 1 - one;
        let ctx = SurgeryContext::heteroclinic(&b, vec![zero], vec![one], vec![zero], 1).unwrap();
        let x = SymbolicSequence::periodic(&[one, zero]);
        let y = surgery_a(&x, &ctx).unwrap();
        y.check_admissible(&b).unwrap();
        assert_eq!(y.left_period().len(), 2);
        assert_eq!(y.at(0), one);
        let bad = SurgeryContext::heteroclinic(&b, vec![zero], vec![one, one], vec![zero], 1);
        assert!(bad.is_err());
    }

    #[test]
    fn sup_identity_and_its_violation() {
        let b = TransitionMatrix::full(2);
        let short = SurgeryContext::heteroclinic(&b, vec![0], vec![1, 1], vec![0], 1).unwrap();
        assert_eq!(short.k, 2);
        let ctx = short.with_k(4).unwrap();
        let f = peaked(&b, &ctx, 3);
        for x in [seq(&[0, 1], &[], &[0, 1], 0), seq(&[1], &[0, 1, 0], &[0], 1), seq(&[0, 1, 1, 1], &[], &[1], 0)] {
            let c = verify_sup_identity(&f, &x, &ctx).unwrap();
            assert!(c.holds, "{x}");
            assert_eq!(c.achieving, vec![0]);
            assert!(c.block_covers_window);
        }
        let violator = seq(&[1], &[1, 0, 0, 0, 1, 1, 0, 0, 0], &[1], 0);
        let c = verify_sup_identity(&f, &violator, &short).unwrap();
        assert!(!c.holds && !c.block_covers_window);
        assert!(c.sup > c.value_at_zero);
        let flat = ShiftObservable::coordinate(&b, &[int(1), int(1)]);
        assert!(verify_sup_identity(&flat, &violator, &short).unwrap().holds);
    }

    #[test]
    fn a1_is_consistent_and_matches_a_locally() {
        let b = TransitionMatrix::full(2);
        let ctx = SurgeryContext::heteroclinic(&b, vec![0], vec![1, 1], vec![0], 1).unwrap();
        let x = seq(&[1], &[0, 1, 1, 0], &[0, 1], 2);
        let w10 = surgery_a1_prefix(&x, &ctx, 10).unwrap();
        let w20 = surgery_a1_prefix(&x, &ctx, 20).unwrap();
        assert_eq!(&w20[10..31], &w10[..]);
        assert!(b.is_admissible(&w20).unwrap());
        let a = surgery_a(&x, &ctx).unwrap();
        let a1 = SurgeryA1::new(&x, &ctx).unwrap();
        for j in 1..6 {
            let n = a1.beta_center(j);
            let r = j as i64;
            assert_eq!(a1.window(n - r, n + r), a.window(-r, r), "block {j}");
        }
    }

    #[test]
    fn a1_of_constant_sequence_spaces_out_blocks() {
        let b = TransitionMatrix::full(2);
        let ctx = SurgeryContext::periodic(&b, vec![1, 0]).unwrap();
        let a1 = SurgeryA1::new(&SymbolicSequence::periodic(&[0]), &ctx).unwrap();
        let centers: Vec<i64> = (1..6).map(|j| a1.beta_center(j)).collect();
        let gaps: Vec<i64> = centers.windows(2).map(|w| w[1] - w[0]).collect();
        assert!(gaps.windows(2).all(|g| g[1] == g[0] + 2));
    }

    #[test]
    fn limsup_identity_for_tables_and_continued_fractions() {
        let b = TransitionMatrix::full(2);
        let ctx = SurgeryContext::heteroclinic(&b, vec![0], vec![1, 1], vec![0], 1).unwrap();
        let f = peaked(&b, &ctx, 2);
        let r = verify_limsup_identity(&f, &SymbolicSequence::periodic(&[0, 1]), &ctx, &[4, 8, 12]).unwrap();
        assert!(r.holds);
        assert!(r.blocks.iter().skip(2).all(|row| row.distance == 0.0));

        let cf = ShiftObservable::continued_fraction(vec![1, 2]).unwrap();
        let ctx = SurgeryContext::periodic(&b, vec![1, 0]).unwrap().with_k(3).unwrap();
        let r = verify_limsup_identity(&cf, &SymbolicSequence::periodic(&[0]), &ctx, &[5, 10]).unwrap();
        assert!(r.holds);
        let d: Vec<f64> = r.blocks.iter().map(|row| row.distance).collect();
        assert!(d.last().unwrap() < &1e-4 && d[0] > *d.last().unwrap());
    }
}
