use dynspec::cantor::{build_cover, limit_geometry, preset, thickness, Thickness};
use dynspec::dimension::{dimension_bounds, removed_cylinder_bounds, solve_sum, RemovalMode};
use dynspec::numeric::rational::{int, rat};
use dynspec::numeric::{parse_surd, Poly2, RatInterval};
use dynspec::spectra::{spectrum_scan, ShiftObservable};
use dynspec::sumsets::image_cover;
use dynspec::symbolic::TransitionMatrix;

#[test]
fn thickness_of_equal_ratio_sets() {
    assert_eq!(thickness(&preset("kalpha:3/5").unwrap(), 1), Thickness::Finite(rat(1, 3)));
    for depth in [1, 3] {
        assert_eq!(thickness(&preset("kalpha:2/5").unwrap(), depth), Thickness::Finite(rat(3, 4)));
        assert_eq!(thickness(&preset("kalpha:1/3").unwrap(), depth), Thickness::Finite(int(1)));
    }
}

#[test]
fn two_scale_pressure_root_is_log2_phi() {
    let (lo, hi) = solve_sum(&[2f64.ln(), 4f64.ln()], &int(1), 1e-13).unwrap();
    let phi = (1.0 + 5f64.sqrt()) / 2.0;
    assert!(lo <= phi.log2() + 1e-12 && phi.log2() - 1e-12 <= hi);
}

#[test]
fn removing_longer_words_costs_less() {
    let k = preset("kalpha:1/3").unwrap();
    let full = dimension_bounds(&k, 1).unwrap();
    let drops: Vec<f64> = (2..=5)
        .map(|m| {
            let r = removed_cylinder_bounds(&k, &vec![0; m], 1, RemovalMode::Blocked).unwrap();
            full.alpha - r.bounds.beta
        })
        .collect();
    assert!(drops.windows(2).all(|w| w[1] < w[0]), "{drops:?}");
    let three = removed_cylinder_bounds(&k, &[0, 1, 0], 2, RemovalMode::Blocked).unwrap();
    assert!(three.bounds.alpha >= 2f64.ln() / 3f64.ln() - 0.0406);
    assert!((three.predicted_drop - 0.04052).abs() < 1e-5);
}

#[test]
fn skew_sum_of_middle_thirds_is_an_interval() {
    let k = preset("kalpha:1/3").unwrap();
    let c = image_cover(&Poly2::parse("x + 2*y").unwrap(), &k, &k, 5);
    assert_eq!(c.union.parts(), &[RatInterval::new(int(0), int(3))]);
    let d = image_cover(&Poly2::parse("x - y").unwrap(), &k, &k, 4);
    assert_eq!(d.union.parts(), &[RatInterval::new(int(-1), int(1))]);
}

#[test]
fn digit_sets_nest() {
    let covers: Vec<_> = [2, 3, 4].iter().map(|n| build_cover(&preset(&format!("c{n}")).unwrap(), 5).union()).collect();
    for w in covers.windows(2) {
        assert!(w[0].parts().iter().all(|iv| w[1].covers(iv)));
    }
}

/// Cylinder lengths of C(2) at a given depth, in floating point.
fn c2_lengths(depth: u32) -> Vec<f64> {
    let (lo, hi) = ((3f64.sqrt() - 1.0) / 2.0, 3f64.sqrt() - 1.0);
    (0u32..1 << depth)
        .map(|code| {
            let at = |t: f64| (0..depth).rev().fold(t, |x, i| 1.0 / (1.0 + (code >> i & 1) as f64 + x));
            (at(lo) - at(hi)).abs()
        })
        .collect()
}

/// Root of `Σ_12 |I|^s = Σ_11 |I|^s`: the ratio cancels the bounded-distortion constant.
fn c2_depth12_estimate() -> f64 {
    let (a12, a11) = (c2_lengths(12), c2_lengths(11));
    let p = |v: &[f64], s: f64| v.iter().map(|l| l.powf(s)).sum::<f64>().ln();
    let (mut a, mut b) = (0.0, 1.0);
    for _ in 0..80 {
        let s = (a + b) / 2.0;
        if p(&a12, s) > p(&a11, s) { a = s } else { b = s }
    }
    a
}

#[test]
fn c2_bounds_agree_with_a_float_oracle() {
    let b = dimension_bounds(&preset("c2").unwrap(), 8).unwrap();
    let est = c2_depth12_estimate();
    assert!(b.width() < 0.02);
    assert!(b.alpha - 0.01 <= est && est <= b.beta + 0.01, "{est} vs [{}, {}]", b.alpha, b.beta);
}

#[test]
fn c2_hull_endpoints_are_surds() {
    let k = preset("c2").unwrap();
    let hull = build_cover(&k, 1).union();
    let span = RatInterval::new(hull.parts()[0].lo.clone(), hull.parts().last().unwrap().hi.clone());
    let l = parse_surd("(sqrt(3) - 1)/2").unwrap().enclose(80);
    let h = parse_surd("sqrt(3) - 1").unwrap().enclose(80);
    assert!(span.lo <= l.hi && l.lo <= span.lo);
    assert!(span.hi <= h.hi && h.lo <= span.hi);
}

#[test]
fn limit_geometry_stages_converge() {
    let k = preset("c2").unwrap();
    let stage = |n: usize| limit_geometry(&k, &vec![0; n + 1]).unwrap();
    let d: Vec<f64> = (2..6).map(|n| stage(n + 1).sup_distance(&stage(n), 64)).collect();
    let s: Vec<f64> = (2..6).map(|n| dynspec::numeric::rational::to_f64(&stage(n).scale.hi)).collect();
    let ratios: Vec<f64> = d.iter().zip(&s).map(|(d, s)| d / s).collect();
    let (lo, hi) = ratios.iter().fold((f64::MAX, 0f64), |(l, h), &r| (l.min(r), h.max(r)));
    assert!(hi < 10.0 * lo.max(1e-300) || hi < 1e-12, "{ratios:?}");
    assert!(d.windows(2).all(|w| w[1] < w[0]));
}

#[test]
fn full12_scan_bottoms_out_at_sqrt5() {
    let f = ShiftObservable::continued_fraction(vec![1, 2]).unwrap();
    let s = spectrum_scan(&f, &TransitionMatrix::full(2), 6, 3).unwrap();
    assert_eq!(s.values[0].value.as_quad().unwrap(), parse_surd("sqrt(5)").unwrap());
    assert!(s.values.iter().all(|v| v.value.to_f64() < 6.0));
}
