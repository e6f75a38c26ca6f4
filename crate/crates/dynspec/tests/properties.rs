use dynspec::cantor::{build_cover, cf_value, preset, CantorPresentation, IntervalUnion, Side};
use dynspec::dimension::{dimension_bounds, product_bounds, removed_cylinder_bounds, RemovalMode};
use dynspec::horseshoe::{check_h_phi, ProductHorseshoe, Verdict};
use dynspec::numeric::rational::{int, rat};
use dynspec::numeric::{Poly2, SurdSum};
use dynspec::spectra::{lagrange_value, markov_value, LocalTable, ShiftObservable};
use dynspec::sumsets::{certify_interval, cover_contains, image_cover, measure_upper_bound, sum_cover, SumOp};
use dynspec::symbolic::{
    bracket, count_paths, enumerate_periodic, metric_distance, random_eventually_periodic, remove_cylinder, Cylinder,
    SymbolicSequence, TransitionMatrix,
};
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn matrix() -> impl Strategy<Value = TransitionMatrix> {
    (2usize..=4)
        .prop_flat_map(|n| prop::collection::vec(prop::collection::vec(prop::bool::weighted(0.6), n), n))
        .prop_filter_map("not a valid SFT", |rows| TransitionMatrix::new(rows).ok())
}

fn shifts() -> impl Strategy<Value = TransitionMatrix> {
    prop_oneof![Just(TransitionMatrix::full(2)), Just(TransitionMatrix::golden_mean()), Just(TransitionMatrix::full(3))]
}

fn sequence(b: &TransitionMatrix, seed: u64) -> SymbolicSequence {
    random_eventually_periodic(&mut ChaCha8Rng::seed_from_u64(seed), b, 6, 3)
}

fn small_set() -> impl Strategy<Value = CantorPresentation> {
    prop_oneof![
        (2u64..=4).prop_map(|n| preset(&format!("c{n}")).unwrap()),
        (1i64..=9).prop_map(|k| preset(&format!("kalpha:{k}/20")).unwrap()),
    ]
}

fn inside(a: &IntervalUnion, b: &IntervalUnion) -> bool {
    a.parts().iter().all(|iv| b.covers(iv))
}

fn table(b: &TransitionMatrix, seed: u64) -> ShiftObservable {
    ShiftObservable::Table(LocalTable::from_fn(b, 1, |w| {
        rat(((w[0] * 7 + w[1] * 3 + w[2] * 5) as u64 * (seed % 11 + 1) % 11) as i64, 3)
    }))
}

proptest! {
    #![proptest_config(ProptestConfig { cases: 40, failure_persistence: None, ..ProptestConfig::default() })]

    #[test]
    fn path_counts_compose(b in matrix(), n in 0usize..6, m in 0usize..6) {
        let k = b.size();
        for x in 0..k {
            for y in 0..k {
                let split = (0..k).map(|z| count_paths(&b, x, z, n).unwrap() * count_paths(&b, z, y, m).unwrap()).sum();
                prop_assert_eq!(count_paths(&b, x, y, n + m).unwrap(), split);
            }
        }
    }

    #[test]
    fn metric_sees_the_zero_coordinate(b in shifts(), s in any::<u64>(), t in any::<u64>()) {
        let (x, y) = (sequence(&b, s), sequence(&b, t));
        let d = metric_distance(&x, &y);
        prop_assert!(d <= int(1));
        prop_assert_eq!(d < rat(1, 2), x.at(0) == y.at(0));
        prop_assert_eq!(metric_distance(&x, &x), int(0));
    }

    #[test]
    fn bracket_splices_halves(b in shifts(), s in any::<u64>(), t in any::<u64>()) {
        let (x, y) = (sequence(&b, s), sequence(&b, t));
        match bracket(&x, &y) {
            Ok(z) => {
                prop_assert!((1..40).all(|i| z.at(i) == x.at(i)));
                prop_assert!((-40..=0).all(|i| z.at(i) == y.at(i)));
            }
            Err(_) => prop_assert_ne!(x.at(0), y.at(0)),
        }
    }

    #[test]
    fn removed_word_never_returns(b in shifts(), s in any::<u64>(), half in 0usize..=1) {
        let w = sequence(&b, s).window(-(half as i64), half as i64);
        let r = remove_cylinder(&b, &Cylinder::centered(w.clone()).unwrap()).unwrap();
        if let Some(m) = &r.matrix {
            for orbit in enumerate_periodic(m, 5) {
                let x = r.decode(&orbit, half);
                let p = orbit.right_period().len() as i64;
                prop_assert!((0..p).all(|i| x.window(i - half as i64, i + half as i64) != w));
            }
        }
    }

    #[test]
    fn periodic_orbits_are_shift_closed(b in matrix(), n in 1usize..=5) {
        let orbits = enumerate_periodic(&b, n);
        for o in &orbits {
            let s = o.shift(1);
            let p = o.right_period().len() as i64;
            prop_assert!((0..p).any(|k| o.shift(k) == s));
        }
    }

    #[test]
    fn covers_are_nested(k in small_set(), n in 1usize..=5) {
        let a = build_cover(&k, n + 1).union();
        let b = build_cover(&k, n).union();
        prop_assert!(inside(&a, &b));
    }

    #[test]
    fn affine_cover_length_is_exact(num in 1i64..=9, n in 1usize..=8) {
        let k = preset(&format!("kalpha:{num}/20")).unwrap();
        let lambda = rat(20 - num, 40);
        let expect = (0..n).fold(int(1), |acc, _| acc * int(2) * &lambda);
        prop_assert_eq!(build_cover(&k, n).union().length(), expect);
    }

    #[test]
    fn cf_value_peels_one_digit(s in any::<u64>()) {
        let b = TransitionMatrix::full(3);
        let x = sequence(&b, s);
        let d = |a: usize| a as u64 + 1;
        let v = SurdSum::from(cf_value(&x, d, Side::Positive));
        let tail = cf_value(&x.shift(1), d, Side::Positive);
        let peeled = SurdSum::from(tail.recip()).add(&SurdSum::from(int(d(x.at(0)) as i64)));
        prop_assert_eq!(v, peeled);
    }

    #[test]
    fn dimension_bounds_bracket(k in small_set(), n in 1usize..=4) {
        let b = dimension_bounds(&k, n).unwrap();
        prop_assert!(b.alpha <= b.beta);
    }

    #[test]
    fn equal_ratio_sets_hit_the_closed_form(num in 1i64..=19, n in 1usize..=3) {
        let k = preset(&format!("kalpha:{num}/20")).unwrap();
        let b = dimension_bounds(&k, n).unwrap();
        let d = 2f64.ln() / (40.0 / (20 - num) as f64).ln();
        prop_assert!((b.alpha - d).abs() < 1e-9 && (b.beta - d).abs() < 1e-9);
    }

    #[test]
    fn removal_never_raises_dimension(num in 1i64..=9, w in 0usize..4) {
        let k = preset(&format!("kalpha:{num}/20")).unwrap();
        let full = dimension_bounds(&k, 2).unwrap();
        let r = removed_cylinder_bounds(&k, &[w >> 1, w & 1], 2, RemovalMode::Blocked).unwrap();
        prop_assert!(r.bounds.beta <= full.beta + 1e-12);
        prop_assert!(r.bounds.alpha >= full.alpha - r.predicted_drop - 1e-9);
    }

    #[test]
    fn product_dimension_adds(num in 1i64..=9, n in 1usize..=3) {
        let k = preset(&format!("kalpha:{num}/20")).unwrap();
        let h = ProductHorseshoe::symmetric(k.clone()).unwrap();
        let d = h.dimension(n).unwrap();
        let f = dimension_bounds(&k, n).unwrap();
        let (lo, hi) = product_bounds(&f, &f);
        prop_assert!((d.lower - lo).abs() < 1e-9 && (d.upper - hi).abs() < 1e-9);
        prop_assert!((d.lower - d.stable.alpha - d.unstable.alpha).abs() < 1e-12);
    }

    #[test]
    fn spectra_are_shift_invariant(b in shifts(), s in any::<u64>(), j in -6i64..6, cf in any::<bool>()) {
        let x = sequence(&b, s);
        let f = if cf && b.size() == 2 && b == TransitionMatrix::full(2) {
            ShiftObservable::continued_fraction(vec![1, 2]).unwrap()
        } else {
            table(&b, s)
        };
        let y = x.shift(j);
        prop_assert_eq!(markov_value(&f, &x).unwrap().value, markov_value(&f, &y).unwrap().value);
        prop_assert_eq!(lagrange_value(&f, &x).unwrap().value, lagrange_value(&f, &y).unwrap().value);
    }

    #[test]
    fn limsup_below_sup(b in shifts(), s in any::<u64>()) {
        let x = sequence(&b, s);
        for f in [table(&b, s), ShiftObservable::continued_fraction((1..=b.size() as u64).collect()).unwrap()] {
            prop_assert!(lagrange_value(&f, &x).unwrap().value <= markov_value(&f, &x).unwrap().value);
        }
    }

    #[test]
    fn sum_covers_shrink(k in small_set(), n in 1usize..=4) {
        let a = sum_cover(&k, &k, n + 1);
        let b = sum_cover(&k, &k, n);
        prop_assert!(inside(&a.union, &b.union));
        prop_assert!(measure_upper_bound(&a) <= measure_upper_bound(&b));
    }

    #[test]
    fn plus_image_is_the_sum_cover(k in small_set(), n in 1usize..=4) {
        let a = image_cover(&SumOp::Plus.poly(), &k, &k, n);
        let b = sum_cover(&k, &k, n);
        prop_assert_eq!(a.union.parts(), b.union.parts());
    }

    #[test]
    fn conjugacy_commutes_with_the_shift(num in 1i64..=9, s in any::<u64>()) {
        let h = ProductHorseshoe::symmetric(preset(&format!("kalpha:{num}/20")).unwrap()).unwrap();
        let mut x = sequence(h.matrix(), s);
        for _ in 0..4 {
            let p = h.conjugacy_exact(&x).unwrap();
            let q = h.step(x.at(0), x.at(1), &p).unwrap();
            x = x.shift(1);
            prop_assert_eq!(h.conjugacy_exact(&x).unwrap(), q.clone());
            let (bx, by) = h.conjugacy_point(&x, 6).unwrap();
            prop_assert!(bx.contains(&q.0) && by.contains(&q.1));
        }
    }

    #[test]
    fn h_phi_pass_survives_refinement(a in -3i64..=3, b in -3i64..=3, c in -2i64..=2) {
        let h = ProductHorseshoe::symmetric(preset("kalpha:1/3").unwrap()).unwrap();
        let f = Poly2::parse(&format!("{a}*x + {b}*y + {c}*x*y")).unwrap();
        if check_h_phi(&f, &h, 5, 64).verdict == Verdict::Pass {
            prop_assert_eq!(check_h_phi(&f, &h, 7, 64).verdict, Verdict::Pass);
            prop_assert_eq!(check_h_phi(&f, &h, 5, 128).verdict, Verdict::Pass);
        }
    }
}

#[test]
fn certified_intervals_sit_inside_the_cover() {
    for (name, depth) in [("c4", 4), ("c5", 3), ("kalpha:1/5", 6)] {
        let k = preset(name).unwrap();
        let (lo, hi) = dynspec::sumsets::auto_interval(&k, &k, &rat(1, 1000)).unwrap();
        let cert = certify_interval(&k, &k, &lo, &hi, depth);
        if cert.is_certified() {
            assert!(cover_contains(&sum_cover(&k, &k, depth), &lo, &hi), "{name}");
        }
    }
}
