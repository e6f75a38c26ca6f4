use std::sync::atomic::{AtomicUsize, Ordering};
use std::time::{Duration, Instant};

use dynspec::cantor::{preset, CantorPresentation};
use dynspec::dimension::{derivative_bounds, dimension_bounds, product_bounds, removed_cylinder_bounds, RemovalMode};
use dynspec::horseshoe::{load_presentation, main_theorem_demo, DemoConfig};
use dynspec::numeric::rational::{int, rat, to_f64};
use dynspec::numeric::parse_surd;
use dynspec::spectra::{
    check_l_subset_m, classical_lagrange, verify_limsup_identity, verify_sup_identity, LocalTable, ShiftObservable,
    SurgeryContext,
};
use dynspec::sumsets::{certify_interval, cover_contains, image_cover, measure_upper_bound, self_similar_cover, sum_cover, Certification, SumOp};
use dynspec::symbolic::{count_paths, metric_distance, random_eventually_periodic, SymbolicSequence, TransitionMatrix};
use proptest::prelude::*;
use proptest::test_runner::{Config, TestRunner};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde_json::json;

static FAILED: AtomicUsize = AtomicUsize::new(0);

fn report(n: usize, name: &str, ok: bool, elapsed: Duration, limit: Duration, detail: String) {
    let within = elapsed <= limit;
    let verdict = if ok && within { "PASS" } else { "FAIL" };
    println!("{verdict} criterion {n:>2} ({name}): {detail}; {:.2}s of {}s", elapsed.as_secs_f64(), limit.as_secs());
    if !(ok && within) {
        FAILED.fetch_add(1, Ordering::SeqCst);
    }
}

/// `limsup (a_n + b_n)` in floating point over many periods of a purely periodic expansion.
fn float_lagrange(period: &[u64]) -> f64 {
    let p = period.len();
    let digit = |i: usize| period[i % p] as f64;
    let depth = 80 * p;
    (0..p)
        .map(|j| {
            let i = 40 * p + j;
            let fwd = (1..depth).rev().fold(0.0, |t, s| 1.0 / (digit(i + s) + t)) + digit(i);
            let back = (1..=40 * p).rev().fold(0.0, |t, s| 1.0 / (digit(i - s) + t));
            fwd + back
        })
        .fold(f64::MIN, f64::max)
}

fn criterion_01_classical_values() {
    let t = Instant::now();
    let mut ok = true;
    let mut detail = vec![];
    for (d, expect, text) in [(1u64, 5f64.sqrt(), "sqrt(5)"), (2, 8f64.sqrt(), "2*sqrt(2)")] {
        let v = classical_lagrange(&[], &[d]).unwrap();
        let exact = parse_surd(text).unwrap();
        let e = v.enclose(64);
        let oracle = float_lagrange(&[d]);
        let close = (v.to_f64() - expect).abs() < 1e-9 && (oracle - expect).abs() < 1e-9;
        let enclosed = to_f64(&e.lo) <= expect + 1e-12 && expect - 1e-12 <= to_f64(&e.hi);
        ok &= v == exact && close && enclosed;
        detail.push(format!("[{d}] -> {v}"));
    }
    report(1, "classical values", ok, t.elapsed(), Duration::from_secs(1), detail.join(", "));
}

fn criterion_02_lower_bound_law() {
    let t = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    let floor = 5f64.sqrt() - 1e-9;
    let mut worst = f64::INFINITY;
    let mut ok = true;
    for _ in 0..250 {
        let prefix: Vec<u64> = (0..rng.gen_range(0..6)).map(|_| rng.gen_range(1..=5)).collect();
        let period: Vec<u64> = (0..rng.gen_range(1..=4)).map(|_| rng.gen_range(1..=5)).collect();
        let v = classical_lagrange(&prefix, &period).unwrap().to_f64();
        let oracle = float_lagrange(&period);
        ok &= v >= floor && (v - oracle).abs() < 1e-9;
        worst = worst.min(v);
    }
    report(2, "lower bound law", ok, t.elapsed(), Duration::from_secs(30), format!("250 sequences, min {worst:.12}"));
}

fn criterion_03_dimension_closed_form() {
    let t = Instant::now();
    let mut ok = true;
    let mut detail = vec![];
    for (name, a) in [("kalpha:1/3", 1.0f64 / 3.0), ("kalpha:1/5", 0.2), ("kalpha:9/20", 0.45)] {
        let k = preset(name).unwrap();
        let b = dimension_bounds(&k, 4).unwrap();
        let d = -(2f64.ln()) / ((1.0 - a) / 2.0).ln();
        ok &= b.contains(d, 1e-12) && b.width() <= 1e-9;
        detail.push(format!("{a}: [{:.12}, {:.12}] vs {d:.12}", b.alpha, b.beta));
    }
    report(3, "dimension closed form", ok, t.elapsed(), Duration::from_secs(5), detail.join("; "));
}

fn criterion_04_dimension_convergence() {
    let t = Instant::now();
    let k = preset("c2").unwrap();
    let b6 = dimension_bounds(&k, 6).unwrap();
    let b8 = dimension_bounds(&k, 8).unwrap();
    let nested = b8.alpha >= b6.alpha - 1e-6 && b8.beta <= b6.beta + 1e-6;
    let (lo, hi) = (b6.alpha.max(b8.alpha), b6.beta.min(b8.beta));
    let common = lo <= hi && lo < 0.54 && hi > 0.52;
    let ok = b8.width() < 0.05 && nested && common;
    let detail = format!("depth 6 [{:.8}, {:.8}], depth 8 [{:.8}, {:.8}]", b6.alpha, b6.beta, b8.alpha, b8.beta);
    report(4, "dimension convergence", ok, t.elapsed(), Duration::from_secs(120), detail);
}

/// Full-shift affine presentation from alternating piece and gap weights.
fn affine_from(weights: &[u32], reversing: &[bool]) -> CantorPresentation {
    let total: u32 = weights.iter().sum();
    let mut at = 0;
    let mut pieces = vec![];
    for (i, w) in weights.iter().enumerate() {
        if i % 2 == 0 {
            pieces.push(json!([format!("{at}/{total}"), format!("{}/{total}", at + w), reversing[i / 2]]));
        }
        at += w;
    }
    load_presentation(&json!({ "pieces": pieces })).unwrap()
}

fn criterion_05_gap_bound() {
    let t = Instant::now();
    let mut runner = TestRunner::new(Config { cases: 48, failure_persistence: None, ..Config::default() });
    let sets = (2usize..=4)
        .prop_flat_map(|m| (prop::collection::vec(1u32..6, 2 * m - 1), prop::collection::vec(any::<bool>(), m)))
        .prop_map(|(w, r)| affine_from(&w, &r));
    let cf = (2u64..=4).prop_map(|n| preset(&format!("c{n}")).unwrap());
    let strategy = (prop_oneof![sets, cf], 1usize..=5);
    let result = runner.run(&strategy, |(k, n)| {
        let stats = derivative_bounds(&k, n).unwrap();
        let (log_a, log_l) = (to_f64(&stats.a).ln(), to_f64(&stats.lambda).ln());
        let b = dimension_bounds(&k, n).unwrap();
        if n as f64 * log_l > log_a {
            let bound = b.beta * log_a / (n as f64 * log_l - log_a);
            prop_assert!(b.width() <= bound + 1e-9, "{}: width {} above {}", k.name, b.width(), bound);
        }
        Ok(())
    });
    let ok = result.is_ok();
    let detail = match result {
        Ok(()) => "48 random presentations and depths".to_string(),
        Err(e) => e.to_string(),
    };
    report(5, "gap bound", ok, t.elapsed(), Duration::from_secs(60), detail);
}

fn criterion_06_cylinder_removal() {
    let t = Instant::now();
    let k = preset("kalpha:1/3").unwrap();
    let full = dimension_bounds(&k, 2).unwrap();
    let allowed = (8f64 / 7.0).ln() / (3.0 * 3f64.ln());
    let mut worst: f64 = 0.0;
    for w in 0..8usize {
        let word = vec![w >> 2 & 1, w >> 1 & 1, w & 1];
        let r = removed_cylinder_bounds(&k, &word, 2, RemovalMode::Blocked).unwrap();
        worst = worst.max(full.beta - r.bounds.alpha);
    }
    let ok = worst <= allowed + 1e-6;
    report(6, "cylinder removal", ok, t.elapsed(), Duration::from_secs(10), format!("largest drop {worst:.9}, allowed {allowed:.9}"));
}

fn criterion_07_hall_interval() {
    let t = Instant::now();
    let k = preset("c4").unwrap();
    let lo = parse_surd("sqrt(2) - 1 + 1/1000").unwrap();
    let hi = parse_surd("4*sqrt(2) - 4 - 1/1000").unwrap();
    let covered = cover_contains(&sum_cover(&k, &k, 5), &lo, &hi);
    let cert = certify_interval(&k, &k, &lo, &hi, 5);
    let thick = match &cert {
        Certification::Certified(c) => c.thickness.iter().all(|d| d.product_at_least_one),
        Certification::Refused(_) => false,
    };
    let ok = covered && cert.is_certified() && thick;
    report(7, "Hall interval", ok, t.elapsed(), Duration::from_secs(120), format!("no gap: {covered}, certified: {}, thickness > 1: {thick}", cert.is_certified()));
}

fn criterion_08_counterexample() {
    let t = Instant::now();
    let k = preset("kalpha:2/5").unwrap();
    let minus = SumOp::Minus.poly();
    let explicit = image_cover(&minus, &k, &k, 10);
    let mut lengths = vec![(10, to_f64(&measure_upper_bound(&explicit)))];
    for n in [20, 30] {
        let c = self_similar_cover(&k, &k, SumOp::Minus, 10, n).unwrap();
        lengths.push((n, to_f64(&measure_upper_bound(&c))));
    }
    let mut ok = lengths.iter().all(|&(n, l)| l <= 2.0 * 0.9f64.powi(n as i32) * (1.0 + 1e-6));
    ok &= lengths.windows(2).all(|w| w[1].1 <= w[0].1 * 0.9f64.powi(10) * (1.0 + 1e-6));
    let d = dimension_bounds(&k, 3).unwrap();
    let (prod_lo, _) = product_bounds(&d, &d);
    ok &= prod_lo > 1.0;
    let shown: Vec<String> = lengths.iter().map(|(n, l)| format!("n={n}: {l:.3e}")).collect();
    report(8, "counterexample", ok, t.elapsed(), Duration::from_secs(60), format!("{}, product dimension >= {prod_lo:.6}", shown.join(", ")));
}

/// Value 2 exactly on the centered window of the context's maximizer, below 1 elsewhere.
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

fn criterion_09_surgery_identities() {
    let t = Instant::now();
    let b = TransitionMatrix::full(2);
    let short = SurgeryContext::heteroclinic(&b, vec![0], vec![1, 1], vec![0], 1).unwrap();
    let ctx = short.with_k(4).unwrap();
    let f = peaked(&b, &ctx, 3);
    let mut rng = ChaCha8Rng::seed_from_u64(9);
    let mut failures = 0;
    let n = 120;
    for _ in 0..n {
        let x = random_eventually_periodic(&mut rng, &b, 8, 3);
        let sup = verify_sup_identity(&f, &x, &ctx).unwrap();
        let lim = verify_limsup_identity(&f, &x, &ctx, &[4, 8]).unwrap();
        failures += (!sup.holds || !lim.holds) as usize;
    }
    let violator = SymbolicSequence::new(vec![1], vec![1, 0, 0, 0, 1, 1, 0, 0, 0], vec![1], 0).unwrap();
    let v = verify_sup_identity(&f, &violator, &short).unwrap();
    let caught = !v.holds && v.sup > v.value_at_zero;
    let ok = failures == 0 && caught;
    report(9, "surgery identities", ok, t.elapsed(), Duration::from_secs(60), format!("{n} instances, {failures} failures, violator rejected: {caught}"));
}

fn criterion_10_l_subset_m() {
    let t = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(10);
    let golden = TransitionMatrix::golden_mean();
    let table = ShiftObservable::Table(LocalTable::from_fn(&golden, 1, |w| rat((w[0] * 5 + w[1] * 3 + w[2] * 2) as i64, 3)));
    let full = TransitionMatrix::full(3);
    let cf = ShiftObservable::continued_fraction(vec![1, 2, 3]).unwrap();
    let mut held = vec![];
    for (b, f) in [(&golden, &table), (&full, &cf)] {
        let pts: Vec<_> = (0..200).map(|_| random_eventually_periodic(&mut rng, b, 6, 3)).collect();
        let w = check_l_subset_m(f, &pts).unwrap();
        held.push(w.iter().filter(|w| w.holds).count());
    }
    let ok = held.iter().all(|&h| h == 200);
    report(10, "L inside M", ok, t.elapsed(), Duration::from_secs(30), format!("table {}/200, continued fraction {}/200", held[0], held[1]));
}

fn criterion_11_splice_demo() {
    let t = Instant::now();
    let demo = main_theorem_demo(&DemoConfig::demo()).unwrap();
    let stages_present = demo.stages.len() == 6 && demo.stages.iter().all(|s| s.ok && !s.certificate.is_null());
    let width = demo
        .interval
        .as_ref()
        .map(|(lo, hi)| hi.parse::<f64>().unwrap() - lo.parse::<f64>().unwrap())
        .unwrap_or(0.0);
    let refusal = main_theorem_demo(&DemoConfig::kalpha04()).unwrap();
    let refused = !refusal.certified && refusal.failure.as_deref().is_some_and(|f| f.starts_with("thickness"));
    let ok = demo.certified && stages_present && width > 0.0 && refused;
    let detail = format!("interval {:?} (width {width:.6}), K_0.4 refused for thickness: {refused}", demo.interval);
    report(11, "splice demo", ok, t.elapsed(), Duration::from_secs(300), detail);
}

fn criterion_12_exactness_oracles() {
    let t = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(12);
    let mut matrices = vec![];
    while matrices.len() < 5 {
        let n = rng.gen_range(2..=4);
        let rows: Vec<Vec<bool>> = (0..n).map(|_| (0..n).map(|_| rng.gen_bool(0.6)).collect()).collect();
        if let Ok(b) = TransitionMatrix::new(rows.clone()) {
            matrices.push((b, rows));
        }
    }
    let mut paths_ok = true;
    for (b, rows) in &matrices {
        let n = rows.len();
        for len in 0..=10usize {
            let mut brute = vec![vec![0u64; n]; n];
            let total = n.pow(len as u32 + 1);
            for code in 0..total {
                let word: Vec<usize> = (0..=len).map(|i| code / n.pow(i as u32) % n).collect();
                if word.windows(2).all(|p| rows[p[0]][p[1]]) {
                    brute[word[0]][word[len]] += 1;
                }
            }
            for x in 0..n {
                for y in 0..n {
                    paths_ok &= count_paths(b, x, y, len).unwrap() == brute[x][y].into();
                }
            }
        }
    }
    let tol = 2f64.powi(-50);
    let mut metric_ok = true;
    for _ in 0..50 {
        let a = random_eventually_periodic(&mut rng, &TransitionMatrix::full(3), 6, 3);
        let c = random_eventually_periodic(&mut rng, &TransitionMatrix::full(3), 6, 3);
        let series: f64 = (-60i64..=60).filter(|&k| a.at(k) != c.at(k)).map(|k| 2f64.powi(-(2 * k.abs() as i32 + 1))).sum();
        metric_ok &= (to_f64(&metric_distance(&a, &c)) - series).abs() <= tol;
    }
    let ok = paths_ok && metric_ok;
    report(12, "exactness oracles", ok, t.elapsed(), Duration::from_secs(30), format!("path counts match: {paths_ok}, metric within 2^-50: {metric_ok}"));
}

fn main() {
    std::panic::set_hook(Box::new(|_| {}));
    let criteria: [(usize, fn()); 12] = [
        (1, criterion_01_classical_values),
        (2, criterion_02_lower_bound_law),
        (3, criterion_03_dimension_closed_form),
        (4, criterion_04_dimension_convergence),
        (5, criterion_05_gap_bound),
        (6, criterion_06_cylinder_removal),
        (7, criterion_07_hall_interval),
        (8, criterion_08_counterexample),
        (9, criterion_09_surgery_identities),
        (10, criterion_10_l_subset_m),
        (11, criterion_11_splice_demo),
        (12, criterion_12_exactness_oracles),
    ];
    for (n, run) in criteria {
        if std::panic::catch_unwind(run).is_err() {
            FAILED.fetch_add(1, Ordering::SeqCst);
            println!("FAIL criterion {n:>2}: did not complete");
        }
    }
    let failed = FAILED.load(Ordering::SeqCst);
    println!("{} of {} criteria passed", criteria.len() - failed, criteria.len());
    if failed > 0 {
        std::process::exit(1);
    }
}
