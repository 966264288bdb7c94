mod common;

use common::{delta_direct, kappa_pairs, rel, tau};
use num_complex::Complex64;
use proptest::prelude::*;
use proptest::strategy::ValueTree;
use theta_moment::bergman::qexp::eigenform_coefficients;
use theta_moment::bergman::theta::{horocycle_l2_from_coefficients, theta_series_at};
use theta_moment::bergman::{
    delta_coefficients, elementary_theta_coeffs, eval_cusp_form, eval_level_one, geometric_bound_pipeline, hecke_ratio,
    kernel_sum, petersson_norm, spectral_lower_bound, theta_coefficient, theta_horocycle_l2, Convention,
    KernelSumParams, QExpansion,
};
use theta_moment::halfplane::Point;
use theta_moment::lattice::OrderSpec;

fn pt(s: &str) -> Point {
    s.parse().unwrap()
}

fn params() -> KernelSumParams {
    KernelSumParams::new(12, 1e-12).unwrap()
}

#[test]
fn delta_matches_product_oracle() {
    let t = tau(80);
    assert_eq!(delta_coefficients(80), t);
    assert_eq!(&t[..6], &[1, -24, 252, -1472, 4830, -6048]);
    assert_eq!(eigenform_coefficients(12, 80).unwrap(), t);
}

#[test]
fn modularity() {
    let f = QExpansion::delta(60);
    let z = Complex64::new(0.3, 0.9);
    let w = -z.inv();
    let lhs = eval_cusp_form(&f, &Point::new(w.re, w.im).unwrap()).unwrap();
    let rhs = z.powu(12) * eval_cusp_form(&f, &pt("0.3+0.9i")).unwrap();
    assert!(rel(lhs, rhs) < 1e-10);
    let direct = delta_direct(&tau(60), 0.3, 0.9);
    assert!(rel(eval_cusp_form(&f, &pt("0.3+0.9i")).unwrap(), direct) < 1e-12);
}

#[test]
fn hecke_ratios_match_tau() {
    let t = tau(6);
    for (z, w) in kappa_pairs() {
        for n in 2..=6u64 {
            let k = hecke_ratio(n, &pt(z), &pt(w), &params()).unwrap();
            let expect = t[n as usize - 1] as f64 / (n as f64).powi(5);
            assert!(rel(k, expect.into()) < 1e-6, "n={n} z={z} w={w}: {k}");
        }
    }
}

#[test]
fn hecke_relations_from_kernel_sums() {
    let (z, w) = (pt("0.1+1.2i"), pt("-0.3+0.9i"));
    let s: Vec<Complex64> = (1..=9).map(|n| kernel_sum(n, &z, &w, &params(), OrderSpec::Full).unwrap()).collect();
    let k = |n: usize| s[n - 1] / s[0];
    assert!((k(2) * k(3) - k(6)).norm() < 1e-8);
    assert!((k(2) * k(2) - k(4) - 2.0).norm() < 1e-8);
    assert!((k(3) * k(3) - k(9) - 3.0).norm() < 1e-8);
}

#[test]
fn kappa_is_point_independent() {
    let mut runner = proptest::test_runner::TestRunner::deterministic();
    let s = ((-0.5..0.5f64, 0.9..1.6f64), (-0.5..0.5f64, 0.9..1.6f64));
    let mut values = Vec::new();
    for _ in 0..10 {
        let ((x1, y1), (x2, y2)) = s.new_tree(&mut runner).unwrap().current();
        let z = Point::new(x1, y1).unwrap();
        let w = Point::new(x2, y2).unwrap();
        values.push(hecke_ratio(2, &z, &w, &params()).unwrap());
    }
    let spread = values.iter().map(|v| (v - values[0]).norm()).fold(0.0, f64::max);
    assert!(spread < 1e-8, "{spread}");
}

#[test]
fn theta_coefficients_are_tau_multiples() {
    let (z, w) = (pt("i"), pt("0.2+1.1i"));
    let s1 = kernel_sum(1, &z, &w, &params(), OrderSpec::Full).unwrap();
    for (n, &t) in tau(6).iter().enumerate() {
        let c = theta_coefficient(n as u64 + 1, &z, &w, &params(), OrderSpec::Full).unwrap();
        assert!(rel(c / s1, (t as f64).into()) < 1e-8, "n={}", n + 1);
    }
}

#[test]
fn elementary_theta_factorizes() {
    let f = QExpansion::delta(80);
    let t = tau(50);
    for z in ["i", "0.2+0.9i", "-0.41+1.3i"] {
        let d = eval_level_one(&f, &pt(z)).unwrap();
        let c = elementary_theta_coeffs(&f, &pt(z), 50).unwrap();
        for n in 0..50 {
            assert!(rel(c[n], d * t[n] as f64) < 1e-9, "z={z} n={}", n + 1);
        }
    }
    let a = elementary_theta_coeffs(&f, &pt("0.2+0.9i"), 12).unwrap();
    let b = elementary_theta_coeffs(&f, &pt("1.2+0.9i"), 12).unwrap();
    assert_eq!(a, b);
}

#[test]
fn parseval_matches_direct_integral() {
    let z = pt("0.1+1.1i");
    let tau2 = 1.0;
    let l2 = theta_horocycle_l2(&z, &params(), tau2, 8).unwrap();
    let coeffs: Vec<Complex64> =
        (1..=8).map(|n| theta_coefficient(n, &z, &z, &params(), OrderSpec::Full).unwrap()).collect();
    // The trapezoidal rule is exact for trigonometric polynomials of degree below the node count.
    let nodes = 64;
    let direct: f64 =
        (0..nodes).map(|k| theta_series_at(&coeffs, k as f64 / nodes as f64, tau2).norm_sqr()).sum::<f64>() / nodes as f64;
    assert!((l2 - direct).abs() < 1e-8 * l2, "{l2} {direct}");
    assert!(horocycle_l2_from_coefficients(&coeffs, 2.0 * tau2) < l2);
}

#[test]
fn petersson_against_riemann_sum() {
    let f = QExpansion::delta(80);
    let hyp = petersson_norm(&f, Convention::Hyperbolic).unwrap();
    let coarse = common::petersson_riemann(400, 2000);
    assert!((hyp / coarse - 1.0).abs() < 1e-4, "{hyp} {coarse}");
    let prob = petersson_norm(&f, Convention::Probability).unwrap();
    assert!((prob / hyp - 3.0 / std::f64::consts::PI).abs() < 1e-14);
    let twice = petersson_norm(&f.scale(Complex64::new(2.0, 0.0)), Convention::Hyperbolic).unwrap();
    assert!((twice / hyp - 4.0).abs() < 1e-12);
}

/// `S(1; z, z) <f, f> / ((8 pi / 11) y^12 |Delta(z)|^2) - 1` for each convention.
pub fn bergman_deviation(z: &Point, conv: Convention) -> f64 {
    let f = QExpansion::delta(80);
    let s1 = kernel_sum(1, z, z, &params(), OrderSpec::Full).unwrap().re;
    let norm = petersson_norm(&f, conv).unwrap();
    let d = eval_level_one(&f, z).unwrap();
    s1 * norm / (8.0 * std::f64::consts::PI / 11.0 * z.y.powi(12) * d.norm_sqr()) - 1.0
}

#[test]
fn bergman_constant_under_hyperbolic_measure() {
    for z in ["i", "0.31+0.97i", "-0.22+1.4i", "0.5+0.87i", "0.05+2.2i"] {
        let z = pt(z);
        assert!(bergman_deviation(&z, Convention::Hyperbolic).abs() < 1e-3);
        assert!(bergman_deviation(&z, Convention::Probability).abs() > 1e-2);
    }
}

#[test]
fn bound_goldens() {
    let s = spectral_lower_bound(&pt("i"), 12, Convention::Probability).unwrap();
    assert!((s.value / 7.580_792_303_880_52e-5 - 1.0).abs() < 1e-9, "{}", s.value);
    let g = geometric_bound_pipeline(&pt("i"), 12, OrderSpec::Full, 20).unwrap();
    assert!((g.value / 1.481_147_665_918_544e-3 - 1.0).abs() < 1e-9, "{}", g.value);
    for z in ["0.2+1.1i", "-0.4+0.95i", "2i"] {
        let s = spectral_lower_bound(&pt(z), 12, Convention::Probability).unwrap();
        assert!(s.value.is_finite() && s.value > 0.0);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(12))]

    #[test]
    fn hermitian_and_translation(x1 in -0.5..0.5f64, y1 in 0.9..1.5f64, x2 in -0.5..0.5f64, y2 in 0.9..1.5f64, n in 1u64..4) {
        let z = Point::new(x1, y1).unwrap();
        let w = Point::new(x2, y2).unwrap();
        let a = kernel_sum(n, &z, &w, &params(), OrderSpec::Full).unwrap();
        let b = kernel_sum(n, &w, &z, &params(), OrderSpec::Full).unwrap();
        prop_assert!((a - b.conj()).norm() < 1e-10 * (1.0 + a.norm()));
        let shifted = Point::new(x1 + 1.0, y1).unwrap();
        let c = kernel_sum(n, &shifted, &w, &params(), OrderSpec::Full).unwrap();
        prop_assert!((c.norm() - a.norm()).abs() < 1e-10 * (1.0 + a.norm()));
    }
}
