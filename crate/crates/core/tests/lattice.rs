mod common;

use common::{decimal, naive_scan, RatPoint};
use proptest::prelude::*;
use theta_moment::halfplane::{point_matrix, Frame, Mat2R, Mat2Z, Point};
use theta_moment::lattice::{count_norm_ball, count_profile, enumerate_constrained, CountQuery, OrderSpec};

pub const POINTS: [RatPoint; 3] = [RatPoint::new(0, 1, 1), RatPoint::new(0, 2, 1), RatPoint::new(3, 8, 10)];
pub const DELTAS: [f64; 4] = [0.0, 0.01, 0.1, 1.0];

#[test]
fn profiles_match_naive_scan() {
    for z in POINTS {
        let scan = naive_scan(z, 1, 200, 1.0);
        let frame = Frame::from_point(&z.literal().parse().unwrap());
        for delta in DELTAS {
            let (num, den) = decimal(delta);
            let got = count_profile(OrderSpec::Full, &frame, 200, delta).unwrap();
            assert_eq!(got.counts, scan.profile(200, num, den), "z={} delta={delta}", z.literal());
        }
    }
}

#[test]
fn eichler_profiles_match_naive_scan() {
    for q in [2, 3, 6] {
        let z = RatPoint::new(3, 8, 10);
        let scan = naive_scan(z, q, 60, 0.5);
        let frame = Frame::from_point(&z.literal().parse().unwrap());
        for delta in [0.0, 0.2, 0.5] {
            let (num, den) = decimal(delta);
            let got = count_profile(OrderSpec::eichler(q as u64).unwrap(), &frame, 60, delta).unwrap();
            assert_eq!(got.counts, scan.profile(60, num, den), "q={q} delta={delta}");
        }
    }
}

#[test]
fn engine_small_balls() {
    let id = Mat2R::IDENTITY;
    let brute = |q: i64, bound: i64| {
        let r = -2..=2i64;
        let mut k = 0;
        for a in r.clone() {
            for b in r.clone() {
                for c in r.clone().filter(|c| c % q == 0) {
                    for d in r.clone() {
                        k += (2 * (a * a + b * b + c * c + d * d) <= bound) as usize;
                    }
                }
            }
        }
        k
    };
    assert_eq!(enumerate_constrained(OrderSpec::Full, &id, &id, 2.5).unwrap().len(), brute(1, 5));
    assert_eq!(enumerate_constrained(OrderSpec::Full, &id, &id, 0.5).unwrap().len(), 1);
    assert_eq!(enumerate_constrained(OrderSpec::eichler(2).unwrap(), &id, &id, 1.5).unwrap().len(), brute(2, 3));
}

fn count(order: OrderSpec, frame: &Frame, n: u64, delta: f64) -> u64 {
    count_norm_ball(&CountQuery { order, frame: frame.clone(), n, delta }).unwrap()
}

#[test]
fn elliptic_lower_bound() {
    let frame = Frame::from_point(&Point::i());
    for a in 0..8u64 {
        for b in 0..8u64 {
            let n = a * a + b * b;
            if n > 0 {
                assert!(count(OrderSpec::Full, &frame, n, 0.0) >= 4, "n={n}");
            }
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn gamma_invariance(x in -2.0..2.0f64, y in 0.6..2.0f64, n in 1u64..30, delta in 0.0..0.8f64, k in 0usize..4) {
        let gammas = [Mat2Z::new(1, 1, 0, 1), Mat2Z::new(0, -1, 1, 0), Mat2Z::new(2, 1, 1, 1), Mat2Z::new(1, 0, -3, 1)];
        let z = Point::new(x, y).unwrap();
        let g = point_matrix(&z);
        let moved = Frame::from_matrix(gammas[k].to_real() * g).unwrap();
        let base = Frame::from_matrix(g).unwrap();
        // Stay clear of the floating-point boundary.
        prop_assume!(count(OrderSpec::Full, &base, n, delta * (1.0 - 1e-7)) == count(OrderSpec::Full, &base, n, delta * (1.0 + 1e-7)));
        prop_assert_eq!(count(OrderSpec::Full, &moved, n, delta), count(OrderSpec::Full, &base, n, delta));
    }

    #[test]
    fn monotone_in_delta(x in -0.5..0.5f64, y in 0.7..2.0f64, n in 1u64..40, d1 in 0.0..1.0f64, d2 in 0.0..1.0f64) {
        let frame = Frame::from_point(&Point::new(x, y).unwrap());
        let (lo, hi) = (d1.min(d2), d1.max(d2));
        prop_assert!(count(OrderSpec::Full, &frame, n, lo) <= count(OrderSpec::Full, &frame, n, hi));
    }

    #[test]
    fn transpose_involution(x in -0.5..0.5f64, y in 0.7..2.0f64, n in 1u64..40, delta in 0.0..1.0f64, q in 1u64..5) {
        let frame = Frame::from_point(&Point::new(x, y).unwrap());
        let t = frame.transpose();
        let inv_t = Frame::from_matrix(t.inverse_matrix()).unwrap();
        prop_assume!(count(OrderSpec::Full, &frame, n, delta * (1.0 - 1e-7)) == count(OrderSpec::Full, &frame, n, delta * (1.0 + 1e-7)));
        prop_assert_eq!(count(OrderSpec::Full, &inv_t, n, delta), count(OrderSpec::Full, &frame, n, delta));
        // u(x) = u(x^T) and R^T = w R w^-1, so the frame w^-1 g^-T counts the same set.
        let order = OrderSpec::eichler(q).unwrap();
        let w_inv = Mat2R::new(0.0, -1.0, 1.0, 0.0);
        let tw = Frame::from_matrix(w_inv * t.inverse_matrix()).unwrap();
        prop_assume!(count(order, &frame, n, delta * (1.0 - 1e-7)) == count(order, &frame, n, delta * (1.0 + 1e-7)));
        prop_assert_eq!(count(order, &tw, n, delta), count(order, &frame, n, delta));
    }
}
