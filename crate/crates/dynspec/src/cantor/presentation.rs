use std::sync::Arc;

use num_traits::{One, Signed, Zero};
use serde::Serialize;
use serde_json::{json, Value};

use super::branch::{check_contracting, BranchMap, CertifiedMap, Composite, PiecewiseLinear};
use super::cover::{cylinder, word_map, Cell};
use crate::error::{Error, Result};
use crate::numeric::rational::{self, int};
use crate::numeric::{parse_surd, Mobius, QuadSurd, Rat, RatInterval};
use crate::symbolic::TransitionMatrix;

pub const DEFAULT_BITS: u32 = 128;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum PresentationKind {
    Affine,
    Moebius,
    Table,
}

/// A single inverse branch `f_{from,to} : I(to) -> I(from)`.
#[derive(Clone, Debug)]
pub struct Branch {
    pub from: usize,
    pub to: usize,
    pub map: BranchMap,
}

/// A regular Cantor set: base intervals `I(a)`, a transition matrix and
/// contracting inverse branches for every allowed pair.
#[derive(Clone, Debug)]
pub struct CantorPresentation {
    pub name: String,
    matrix: TransitionMatrix,
    base: Vec<Cell>,
    branches: Vec<Vec<Option<BranchMap>>>,
    digits: Option<Vec<u64>>,
    pub bits: u32,
}

/// One piece of a piecewise-affine expanding map sending `[lo, hi]` onto `[0, 1]`.
#[derive(Clone, Debug, PartialEq)]
pub struct AffinePiece {
    pub lo: Rat,
    pub hi: Rat,
    pub reversing: bool,
}

impl CantorPresentation {
    pub fn new(name: &str, matrix: TransitionMatrix, base: Vec<Cell>, branches: Vec<Branch>) -> Result<Self> {
        let n = matrix.size();
        if base.len() != n {
            return Err(Error::Presentation(format!("{} base intervals for {} letters", base.len(), n)));
        }
        if !matrix.is_irreducible() {
            return Err(Error::Presentation("transition matrix is not irreducible".into()));
        }
        let mut table: Vec<Vec<Option<BranchMap>>> = vec![vec![None; n]; n];
        for br in branches {
            if br.from >= n || br.to >= n {
                return Err(Error::Presentation(format!("branch {}->{} out of range", br.from, br.to)));
            }
            if !matrix.allowed(br.from, br.to) {
                return Err(Error::Presentation(format!("branch {}->{} for a forbidden pair", br.from, br.to)));
            }
            if table[br.from][br.to].is_some() {
                return Err(Error::Presentation(format!("duplicate branch {}->{}", br.from, br.to)));
            }
            table[br.from][br.to] = Some(br.map);
        }
        let k = Self { name: name.to_string(), matrix, base, branches: table, digits: None, bits: DEFAULT_BITS };
        k.validate()?;
        Ok(k)
    }

    fn validate(&self) -> Result<()> {
        let n = self.size();
        for (a, c) in self.base.iter().enumerate() {
            if c.outer.width().is_zero() {
                return Err(Error::Presentation(format!("base interval of letter {a} is degenerate")));
            }
        }
        check_disjoint(&self.base, "base intervals")?;
        for a in 0..n {
            let mut domains = Vec::new();
            for b in self.matrix.successors(a) {
                let map = self.branches[a][b]
                    .as_ref()
                    .ok_or_else(|| Error::Presentation(format!("missing branch {a}->{b}")))?;
                check_contracting(map, &self.base[b].outer, &format!("{a}->{b}"))?;
                let img = cylinder(self, &[a, b]);
                if !inside(&img, &self.base[a]) {
                    return Err(Error::Presentation(format!("branch {a}->{b} leaves I({a})")));
                }
                domains.push(img);
            }
            check_disjoint(&domains, &format!("branch domains in I({a})"))?;
        }
        Ok(())
    }

    /// `K_alpha`: branches `y -> l y` and `y -> 1 - l y` with `l = (1 - alpha)/2`.
    pub fn k_alpha(alpha: Rat) -> Result<Self> {
        if !(alpha.is_positive() && alpha < Rat::one()) {
            return Err(Error::Input(format!("alpha = {alpha} must lie in (0, 1)")));
        }
        let l = (Rat::one() - &alpha) / int(2);
        let pieces = vec![
            AffinePiece { lo: Rat::zero(), hi: l.clone(), reversing: false },
            AffinePiece { lo: Rat::one() - &l, hi: Rat::one(), reversing: true },
        ];
        let mut k = Self::affine(&format!("K_{alpha}"), pieces, TransitionMatrix::full(2))?;
        k.name = format!("K_{alpha}");
        Ok(k)
    }

    /// Piecewise-affine expanding map whose pieces each map onto `[0, 1]`.
    pub fn affine(name: &str, pieces: Vec<AffinePiece>, matrix: TransitionMatrix) -> Result<Self> {
        if pieces.is_empty() {
            return Err(Error::Presentation("no pieces".into()));
        }
        let lo = pieces.iter().map(|p| &p.lo).min().unwrap();
        let hi = pieces.iter().map(|p| &p.hi).max().unwrap();
        if !lo.is_zero() || !hi.is_one() {
            return Err(Error::Presentation("affine pieces must span [0, 1]".into()));
        }
        let base: Vec<Cell> = pieces
            .iter()
            .map(|p| {
                if p.lo >= p.hi {
                    return Err(Error::Presentation("affine piece with lo >= hi".into()));
                }
                Ok(Cell::rational(RatInterval::new(p.lo.clone(), p.hi.clone())))
            })
            .collect::<Result<_>>()?;
        let mut branches = Vec::new();
        for (a, p) in pieces.iter().enumerate() {
            let w = &p.hi - &p.lo;
            let m = if p.reversing { Mobius::affine(-w, p.hi.clone()) } else { Mobius::affine(w, p.lo.clone()) };
            for b in matrix.successors(a) {
                branches.push(Branch { from: a, to: b, map: BranchMap::Mobius(m.clone()) });
            }
        }
        Self::new(name, matrix, base, branches)
    }

    /// `C(N)`: numbers whose continued-fraction digits all lie in `1..=N`.
    /// Letter `a` carries digit `a + 1`, with branch `y -> 1/(a + 1 + y)`.
    pub fn continued_fraction(n: u64) -> Result<Self> {
        if n < 2 {
            return Err(Error::Input("C(N) needs N >= 2".into()));
        }
        let (x_min, x_max) = cf_hull(n);
        let hull = Cell::from_surds(x_min.clone(), x_max.clone(), DEFAULT_BITS);
        let base: Vec<Cell> = (1..=n)
            .map(|d| {
                let f = Composite::Exact(Mobius::gauss_inverse(d));
                hull.image(&f, DEFAULT_BITS)
            })
            .collect();
        let matrix = TransitionMatrix::full(n as usize);
        let branches = (0..n as usize)
            .flat_map(|a| {
                (0..n as usize).map(move |b| Branch {
                    from: a,
                    to: b,
                    map: BranchMap::Mobius(Mobius::gauss_inverse(a as u64 + 1)),
                })
            })
            .collect();
        let mut k = Self::new(&format!("C({n})"), matrix, base, branches)?;
        k.digits = Some((1..=n).collect());
        Ok(k)
    }

    pub fn kind(&self) -> PresentationKind {
        let maps = self.branches.iter().flatten().flatten();
        if maps.clone().all(|m| m.is_affine()) {
            PresentationKind::Affine
        } else if maps.clone().all(|m| m.is_mobius()) {
            PresentationKind::Moebius
        } else {
            PresentationKind::Table
        }
    }

    pub fn matrix(&self) -> &TransitionMatrix {
        &self.matrix
    }

    pub fn size(&self) -> usize {
        self.matrix.size()
    }

    pub fn base_cell(&self, a: usize) -> &Cell {
        &self.base[a]
    }

    pub fn branch(&self, a: usize, b: usize) -> Option<&BranchMap> {
        self.branches[a][b].as_ref()
    }

    /// Continued-fraction digit of each letter, for `C(N)`.
    pub fn digits(&self) -> Option<&[u64]> {
        self.digits.as_deref()
    }

    pub fn is_mixing(&self) -> bool {
        self.matrix.is_primitive()
    }

    /// Convex hull of the set.
    pub fn hull(&self) -> Cell {
        let lo = self.base.iter().min_by(|a, b| a.outer.lo.cmp(&b.outer.lo)).unwrap();
        let hi = self.base.iter().max_by(|a, b| a.outer.hi.cmp(&b.outer.hi)).unwrap();
        match (&lo.exact, &hi.exact) {
            (Some((l, _)), Some((_, h))) => Cell::from_surds(l.clone(), h.clone(), self.bits),
            _ => Cell {
                outer: RatInterval::new(lo.outer.lo.clone(), hi.outer.hi.clone()),
                inner: RatInterval::new(lo.inner.lo.clone(), hi.inner.hi.clone()),
                exact: None,
            },
        }
    }

    /// Upper bound on `sup |f_{a,b}'|` over all branches (the reciprocal of `inf |g'|`).
    pub fn max_contraction(&self) -> Rat {
        let mut best = Rat::zero();
        for a in 0..self.size() {
            for b in self.matrix.successors(a) {
                let d = self.branches[a][b].as_ref().unwrap().derivative_abs(&self.base[b].outer);
                if d.hi > best {
                    best = d.hi;
                }
            }
        }
        best
    }

    /// The set `K` re-presented on `words` (admissible words of a common width `m`).
    ///
    /// `blocked = false`: letters overlap (sliding window), the expanding map is unchanged.
    /// `blocked = true`: letters are consecutive disjoint blocks, the expanding map is `g^m`.
    pub fn recoded(&self, words: &[Vec<usize>], matrix: TransitionMatrix, blocked: bool) -> Result<Self> {
        let base: Vec<Cell> = words.iter().map(|w| cylinder(self, w)).collect();
        let mut branches = Vec::new();
        for (i, w) in words.iter().enumerate() {
            for j in matrix.successors(i) {
                let v = &words[j];
                let map = if blocked {
                    let mut full = w.clone();
                    full.push(v[0]);
                    word_map(self, &full)
                } else {
                    Composite::identity().then_inner(self.branch(w[0], v[0]).expect("admissible"))
                };
                let map = match map {
                    Composite::Exact(m) => BranchMap::Mobius(m),
                    chain => BranchMap::Custom(Arc::new(ChainMap(chain))),
                };
                branches.push(Branch { from: i, to: j, map });
            }
        }
        let name = format!("{} recoded", self.name);
        let mut k = Self::new(&name, matrix, base, branches)?;
        k.bits = self.bits;
        Ok(k)
    }

    pub fn to_json(&self) -> Value {
        let base: Vec<Value> = self
            .base
            .iter()
            .map(|c| match &c.exact {
                Some((l, h)) => json!([l.to_string(), h.to_string()]),
                None => json!([c.outer.lo.to_string(), c.outer.hi.to_string()]),
            })
            .collect();
        let mut branches = Vec::new();
        for a in 0..self.size() {
            for b in self.matrix.successors(a) {
                let mut v = self.branches[a][b].as_ref().unwrap().to_json();
                v["from"] = json!(a);
                v["to"] = json!(b);
                branches.push(v);
            }
        }
        let mut out = json!({
            "type": self.kind(),
            "name": self.name,
            "matrix": self.matrix.to_json(),
            "base": base,
            "branches": branches,
        });
        if let Some(d) = &self.digits {
            out["digits"] = json!(d);
        }
        out
    }

    pub fn from_json(v: &Value) -> Result<Self> {
        let bad = |m: &str| Error::Input(format!("presentation JSON: {m}"));
        if let Some(p) = v.get("preset").and_then(Value::as_str) {
            return preset(p);
        }
        let matrix = TransitionMatrix::from_json(v.get("matrix").ok_or_else(|| bad("missing matrix"))?)?;
        let base = v
            .get("base")
            .and_then(Value::as_array)
            .ok_or_else(|| bad("missing base"))?
            .iter()
            .map(|pair| {
                let p = pair.as_array().filter(|p| p.len() == 2).ok_or_else(|| bad("base entries are pairs"))?;
                let s = |x: &Value| x.as_str().map(str::to_string).unwrap_or_else(|| x.to_string());
                let lo = parse_surd(&s(&p[0]))?;
                let hi = parse_surd(&s(&p[1]))?;
                if lo >= hi {
                    return Err(bad("base interval with lo >= hi"));
                }
                Ok(Cell::from_surds(lo, hi, DEFAULT_BITS))
            })
            .collect::<Result<Vec<_>>>()?;
        let branches = v
            .get("branches")
            .and_then(Value::as_array)
            .ok_or_else(|| bad("missing branches"))?
            .iter()
            .map(|b| {
                let idx = |k: &str| b.get(k).and_then(Value::as_u64).map(|x| x as usize).ok_or_else(|| bad(k));
                let nums = |k: &str| -> Result<Vec<Rat>> {
                    b[k].as_array()
                        .ok_or_else(|| bad(k))?
                        .iter()
                        .map(|x| rational::parse(x.as_str().map(str::to_string).unwrap_or_else(|| x.to_string()).as_str()))
                        .collect()
                };
                let map = if b.get("affine").is_some() {
                    let c = nums("affine")?;
                    if c.len() != 2 || c[0].is_zero() {
                        return Err(bad("affine needs [slope, offset] with nonzero slope"));
                    }
                    BranchMap::Mobius(Mobius::affine(c[0].clone(), c[1].clone()))
                } else if b.get("moebius").is_some() {
                    let c = nums("moebius")?;
                    if c.len() != 4 || (&c[0] * &c[3] - &c[1] * &c[2]).is_zero() {
                        return Err(bad("moebius needs four coefficients with nonzero determinant"));
                    }
                    BranchMap::Mobius(Mobius::new(c[0].clone(), c[1].clone(), c[2].clone(), c[3].clone()))
                } else if let Some(t) = b.get("table").and_then(Value::as_array) {
                    let pts = t
                        .iter()
                        .map(|p| {
                            let p = p.as_array().filter(|p| p.len() == 2).ok_or_else(|| bad("table points are pairs"))?;
                            let s = |x: &Value| x.as_str().map(str::to_string).unwrap_or_else(|| x.to_string());
                            Ok((rational::parse(&s(&p[0]))?, rational::parse(&s(&p[1]))?))
                        })
                        .collect::<Result<Vec<_>>>()?;
                    BranchMap::Custom(Arc::new(PiecewiseLinear::new(pts)?))
                } else {
                    return Err(bad("branch needs affine, moebius or table"));
                };
                Ok(Branch { from: idx("from")?, to: idx("to")?, map })
            })
            .collect::<Result<Vec<_>>>()?;
        let name = v.get("name").and_then(Value::as_str).unwrap_or("custom");
        let mut k = Self::new(name, matrix, base, branches)?;
        if let Some(d) = v.get("digits").and_then(Value::as_array) {
            let d: Vec<u64> = d.iter().map(|x| x.as_u64().ok_or_else(|| bad("digits"))).collect::<Result<_>>()?;
            if d.len() != k.size() || d.contains(&0) {
                return Err(bad("one positive digit per letter"));
            }
            k.digits = Some(d);
        }
        if let Some(t) = v.get("type").and_then(Value::as_str) {
            let ok = matches!(
                (t, k.kind()),
                ("affine", PresentationKind::Affine)
                    | ("moebius", PresentationKind::Affine | PresentationKind::Moebius)
                    | ("table", _)
            );
            if !ok {
                return Err(bad(&format!("declared type {t} does not match the branches")));
            }
        }
        Ok(k)
    }
}

/// Named presentations: `c<N>` and `kalpha:<alpha>`.
pub fn preset(name: &str) -> Result<CantorPresentation> {
    if let Some(a) = name.strip_prefix("kalpha:") {
        return CantorPresentation::k_alpha(rational::parse(a)?);
    }
    if let Some(n) = name.strip_prefix('c').and_then(|n| n.parse::<u64>().ok()) {
        return CantorPresentation::continued_fraction(n);
    }
    Err(Error::Input(format!("unknown preset {name:?}")))
}

/// Endpoints `[0; N, 1, N, 1, ...]` and `[0; 1, N, 1, N, ...]` of `C(N)`.
pub fn cf_hull(n: u64) -> (QuadSurd, QuadSurd) {
    let g = |k| Mobius::gauss_inverse(k);
    let x_max = g(1).compose(&g(n)).attracting_fixed_point().expect("contracting");
    let x_min = g(n).compose(&g(1)).attracting_fixed_point().expect("contracting");
    (x_min, x_max)
}

/// Applies the expanding map to `I(w)`, giving `I(w_1 ... w_{n-1})`; exact branches only.
pub fn expand(k: &CantorPresentation, word: &[usize], cell: &Cell) -> Option<Cell> {
    match k.branch(word[0], *word.get(1)?)? {
        BranchMap::Mobius(m) => Some(cell.image(&Composite::Exact(m.inverse()), k.bits)),
        BranchMap::Custom(_) => None,
    }
}

#[derive(Debug)]
struct ChainMap(Composite);

impl CertifiedMap for ChainMap {
    fn image_outer(&self, iv: &RatInterval) -> RatInterval {
        self.0.image_outer(iv)
    }
    fn image_inner(&self, iv: &RatInterval) -> RatInterval {
        self.0.image_inner(iv)
    }
    fn derivative_abs(&self, iv: &RatInterval) -> RatInterval {
        self.0.derivative_abs(iv)
    }
    fn preserves_orientation(&self) -> bool {
        self.0.preserves_orientation()
    }
    fn to_json(&self) -> Value {
        match &self.0 {
            Composite::Chain(v) => json!({ "chain": v.iter().map(BranchMap::to_json).collect::<Vec<_>>() }),
            Composite::Exact(m) => BranchMap::Mobius(m.clone()).to_json(),
        }
    }
}

fn inside(c: &Cell, outer: &Cell) -> bool {
    match (&c.exact, &outer.exact) {
        (Some((l, h)), Some((ol, oh))) => l >= ol && h <= oh,
        _ => outer.inner.contains_interval(&c.outer),
    }
}

fn check_disjoint(cells: &[Cell], what: &str) -> Result<()> {
    let mut idx: Vec<usize> = (0..cells.len()).collect();
    idx.sort_by(|&a, &b| cells[a].outer.lo.cmp(&cells[b].outer.lo));
    for w in idx.windows(2) {
        let (a, b) = (&cells[w[0]], &cells[w[1]]);
        let ok = match (&a.exact, &b.exact) {
            (Some((_, ah)), Some((bl, _))) => ah < bl,
            _ => a.outer.hi < b.outer.lo,
        };
        if !ok {
            return Err(Error::Presentation(format!("{what} overlap")));
        }
    }
    Ok(())
}
