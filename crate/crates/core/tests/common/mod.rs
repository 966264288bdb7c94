#![allow(dead_code)]

//! Independent oracles shared by the integration suites.

use num_complex::Complex64;
use proptest::prelude::*;
use proptest::test_runner::{Config, TestCaseError, TestRunner};
use theta_moment::halfplane::{bergman_test_function, k_theta, mu, u_invariant, Mat2R, Weight};

/// `tau(1..=n)` from `q prod (1 - q^k)^24`, one factor at a time.
pub fn tau(n: usize) -> Vec<i128> {
    let mut p = vec![0i128; n];
    p[0] = 1;
    for k in 1..n {
        for _ in 0..24 {
            for i in (k..n).rev() {
                p[i] -= p[i - k];
            }
        }
    }
    p
}

/// A rational point `(x_num + i y_num) / den`.
#[derive(Clone, Copy, Debug)]
pub struct RatPoint {
    pub x: i128,
    pub y: i128,
    pub den: i128,
}

impl RatPoint {
    pub const fn new(x: i128, y: i128, den: i128) -> Self {
        RatPoint { x, y, den }
    }

    pub fn literal(&self) -> String {
        let x = self.x as f64 / self.den as f64;
        let y = self.y as f64 / self.den as f64;
        if self.x == 0 {
            format!("{y}i")
        } else {
            format!("{x}+{y}i")
        }
    }

    /// Largest eigenvalue of `g g^T`, the square of `||g||_op = ||g^-1||_op`.
    fn cond(&self) -> f64 {
        let (x, y) = (self.x as f64 / self.den as f64, self.y as f64 / self.den as f64);
        let t = (x * x + y * y + 1.0) / y;
        (t + (t * t - 4.0).max(0.0).sqrt()) / 2.0
    }
}

/// Scanned lattice points: `(det, T)` with `||g^-1 xi g||_F^2 = T / scale`.
pub struct Scan {
    pub scale: i128,
    pub points: Vec<(u64, i128)>,
}

impl Scan {
    /// `#{xi : det xi = n, u <= num/den}` for every `n <= horizon`.
    pub fn profile(&self, horizon: u64, num: i128, den: i128) -> Vec<u64> {
        let mut out = vec![0u64; horizon as usize];
        for &(n, t) in &self.points {
            if n <= horizon && t * den <= (4 * num + 2 * den) * n as i128 * self.scale {
                out[n as usize - 1] += 1;
            }
        }
        out
    }
}

/// Scan the integer ball `||xi|| <= cond(g) sqrt((4 delta + 2) N)` entry by entry,
/// keeping `q | c` and `1 <= det <= N`.
///
/// With `P = g g^T`, `||g^-1 xi g||^2 = Tr(xi P xi^T P^-1)`, and
/// `y P`, `y P^-1` are integral after clearing `den^2`.
pub fn naive_scan(z: RatPoint, q: i64, horizon: u64, delta_max: f64) -> Scan {
    let RatPoint { x, y, den } = z;
    let a_m = [[y * y + x * x, x * den], [x * den, den * den]];
    let b_m = [[den * den, -x * den], [-x * den, y * y + x * x]];
    let scale = den * den * y * y;
    let r = (z.cond() * ((4.0 * delta_max + 2.0) * horizon as f64).sqrt()).ceil() as i64 + 1;
    let limit = (4.0 * delta_max + 2.0) * (1.0 + 1e-9);
    let mut points = Vec::new();
    for a in -r..=r {
        for b in -r..=r {
            let ab = a * a + b * b;
            if ab > r * r {
                continue;
            }
            for c in (-r..=r).filter(|c| c % q == 0) {
                let rest = r * r - ab - c * c;
                if rest < 0 {
                    continue;
                }
                let dm = (rest as f64).sqrt() as i64 + 1;
                for d in -dm..=dm {
                    let det = a * d - b * c;
                    if det < 1 || det as u64 > horizon {
                        continue;
                    }
                    let xi = [[a as i128, b as i128], [c as i128, d as i128]];
                    let t = trace_form(&xi, &a_m, &b_m);
                    if t as f64 <= limit * (det as i128 * scale) as f64 {
                        points.push((det as u64, t));
                    }
                }
            }
        }
    }
    Scan { scale, points }
}

fn mul2(x: &[[i128; 2]; 2], y: &[[i128; 2]; 2]) -> [[i128; 2]; 2] {
    let mut o = [[0; 2]; 2];
    for i in 0..2 {
        for j in 0..2 {
            o[i][j] = x[i][0] * y[0][j] + x[i][1] * y[1][j];
        }
    }
    o
}

fn trace_form(xi: &[[i128; 2]; 2], a: &[[i128; 2]; 2], b: &[[i128; 2]; 2]) -> i128 {
    let xt = [[xi[0][0], xi[1][0]], [xi[0][1], xi[1][1]]];
    let m = mul2(&mul2(&mul2(xi, a), &xt), b);
    m[0][0] + m[1][1]
}

/// Decimal `delta` as an exact fraction.
pub fn decimal(delta: f64) -> (i128, i128) {
    let s = format!("{delta}");
    match s.split_once('.') {
        None => (s.parse().unwrap(), 1),
        Some((i, f)) => {
            let den = 10i128.pow(f.len() as u32);
            let sign = if i.starts_with('-') { -1 } else { 1 };
            let ip: i128 = i.trim_start_matches('-').parse().unwrap();
            (sign * (ip * den + f.parse::<i128>().unwrap()), den)
        }
    }
}

/// `(n, D_B Nr b)` for all pairs `(a, b)` in `O_E^2` with `1 <= n <= horizon`
/// found by scanning `|x|, |y| <= r` for both coordinates of both `a` and `b`.
/// Norm form `x^2 + xy + ((1 - D)/4) y^2`, `D = 1 mod 4`.
pub fn naive_quat_pairs(d_e: i64, d_b: i64, horizon: i64, r: i64) -> Vec<(i64, i64)> {
    let c = (1 - d_e) / 4;
    let nr = |x: i64, y: i64| x * x + x * y + c * y * y;
    let elems: Vec<i64> = (-r..=r).flat_map(|x| (-r..=r).map(move |y| (x, y))).map(|(x, y)| nr(x, y)).collect();
    let mut out = Vec::new();
    for &na in &elems {
        for &nb in &elems {
            let n = na - d_b * nb;
            if (1..=horizon).contains(&n) {
                out.push((n, d_b * nb));
            }
        }
    }
    out
}

/// Count from [`naive_quat_pairs`] output: `D_B Nr b <= delta n`.
pub fn quat_count_from_pairs(pairs: &[(i64, i64)], n: i64, delta: (i128, i128)) -> u64 {
    pairs.iter().filter(|&&(m, t)| m == n && (t as i128) * delta.1 <= delta.0 * n as i128).count() as u64
}

pub fn mat() -> impl Strategy<Value = Mat2R> {
    (-3.0..3.0f64, -3.0..3.0f64, -3.0..3.0f64, -3.0..3.0f64).prop_map(|(a, b, c, d)| Mat2R::new(a, b, c, d))
}

pub fn positive_mat() -> impl Strategy<Value = Mat2R> {
    mat().prop_filter("Nr x > 0.1", |x| x.det() > 0.1)
}

/// `N(x) = Nr(x)^(m/2 - 1) mu(x)^m`.
pub fn harmonic(x: &Mat2R, m: u32) -> Complex64 {
    mu(x).powu(m) * x.det().powf(m as f64 / 2.0 - 1.0)
}

fn shifted(x: &Mat2R, e: [f64; 4]) -> Mat2R {
    Mat2R::new(x.a + e[0], x.b + e[1], x.c + e[2], x.d + e[3])
}

fn mixed(x: &Mat2R, m: u32, i: usize, j: usize, h: f64) -> Complex64 {
    let at = |si: f64, sj: f64| {
        let mut e = [0.0; 4];
        e[i] += si * h;
        e[j] += sj * h;
        harmonic(&shifted(x, e), m)
    };
    (at(1.0, 1.0) - at(1.0, -1.0) - at(-1.0, 1.0) + at(-1.0, -1.0)) / (4.0 * h * h)
}

/// `(Delta N, |d_ad N| + |d_bc N|)` by central differences.
pub fn laplacian(x: &Mat2R, m: u32, h: f64) -> (Complex64, f64) {
    let ad = mixed(x, m, 0, 3, h);
    let bc = mixed(x, m, 1, 2, h);
    (ad - bc, ad.norm() + bc.norm())
}

/// `(<x, grad> N, sum_i |x_i d_i N|)` by central differences.
pub fn euler(x: &Mat2R, m: u32, h: f64) -> (Complex64, f64) {
    let coords = [x.a, x.b, x.c, x.d];
    let terms: Vec<Complex64> = (0..4)
        .map(|i| {
            let mut e = [0.0; 4];
            e[i] = h;
            let fp = harmonic(&shifted(x, e), m);
            e[i] = -h;
            let fm = harmonic(&shifted(x, e), m);
            (fp - fm) / (2.0 * h) * coords[i]
        })
        .collect();
    (terms.iter().sum(), terms.iter().map(|t| t.norm()).sum())
}

/// `4^m ((m - 1) / (2 pi e))^(m - 1)`: bounds `|M(x)| (1 + ||x||)^m` for `||x|| >= 1`.
pub fn decay_constant(m: u32) -> f64 {
    let m = m as f64;
    4f64.powf(m) * ((m - 1.0) / (2.0 * std::f64::consts::PI * std::f64::consts::E)).powf(m - 1.0)
}

fn check(ok: bool, msg: impl FnOnce() -> String) -> Result<(), TestCaseError> {
    if ok {
        Ok(())
    } else {
        Err(TestCaseError::fail(msg()))
    }
}

fn run<S: Strategy>(
    cases: u32,
    s: S,
    f: impl Fn(S::Value) -> Result<(), TestCaseError>,
) -> Result<(), String> {
    let mut runner = TestRunner::new(Config { cases, failure_persistence: None, ..Config::default() });
    runner.run(&s, f).map_err(|e| e.to_string())
}

/// Harmonicity and homogeneity of `N` for Nr > 0.1 and weights 4..=20.
pub fn pde_suite(cases: u32) -> Result<(), String> {
    run(cases, (positive_mat(), (2u32..=10).prop_map(|k| 2 * k)), |(x, m)| {
        let h = 1e-4;
        let (lap, scale) = laplacian(&x, m, h);
        check(lap.norm() <= 1e-4 * scale, || format!("Laplacian {lap} vs {scale} at {x:?}, m={m}"))?;
        let n = harmonic(&x, m);
        let (e, scale) = euler(&x, m, h);
        let rel = (e - n * (m as f64 - 2.0)).norm() / scale;
        check(rel < 1e-4, || format!("Euler relative error {rel} at {x:?}, m={m}"))
    })
}

/// `|M(x)| (1 + ||x||)^m <= C_m` on `1 <= ||x|| <= 100`.
pub fn decay_suite(cases: u32) -> Result<(), String> {
    let s = (mat(), 1.0..100.0f64, 2u32..40).prop_filter("nonzero", |(x, _, _)| x.frobenius_sq() > 1e-6);
    run(cases, s, |(x, r, m)| {
        let x = x.scale(r / x.frobenius_sq().sqrt());
        let v = bergman_test_function(&x, Weight::new(m).unwrap()).norm() * (1.0 + r).powi(m as i32);
        check(v <= decay_constant(m), || format!("{v} > C_{m} at {x:?}"))
    })
}

/// `|mu|^2 (1 + u) = 1`, `M(k_t1 x k_t2) = e^(i m (t1 + t2)) M(x)`, transpose and scale invariance.
pub fn mu_suite(cases: u32) -> Result<(), String> {
    let s = (positive_mat(), -3.0..3.0f64, -3.0..3.0f64, prop_oneof![-5.0..-0.2f64, 0.2..5.0f64], 2u32..30);
    run(cases, s, |(g, t1, t2, lam, m)| {
        let u = u_invariant(&g).unwrap();
        let mu_g = mu(&g);
        check((mu_g.norm_sqr() * (1.0 + u) - 1.0).abs() < 1e-12, || format!("|mu|^2 (1+u) at {g:?}"))?;
        let rot = mu(&(g * k_theta(t1)));
        check((rot - mu_g * Complex64::from_polar(1.0, t1)).norm() < 1e-12, || format!("mu(g k) at {g:?}"))?;
        let w = Weight::new(m).unwrap();
        let lhs = bergman_test_function(&(k_theta(t1) * g * k_theta(t2)), w);
        let rhs = bergman_test_function(&g, w) * Complex64::from_polar(1.0, m as f64 * (t1 + t2));
        check((lhs - rhs).norm() < 1e-12 * (1.0 + rhs.norm()), || format!("M(k g k) at {g:?}"))?;
        let ut = u_invariant(&g.transpose()).unwrap();
        let us = u_invariant(&g.scale(lam)).unwrap();
        check((ut - u).abs() < 1e-12 * (1.0 + u) && (us - u).abs() < 1e-12 * (1.0 + u), || format!("u invariance at {g:?}"))?;
        check((mu(&g.transpose()).norm() - mu_g.norm()).abs() < 1e-12, || "transpose |mu|".into())?;
        let scaled = g.scale(lam);
        check((mu(&scaled).norm() - mu_g.norm()).abs() < 1e-12, || "scaled |mu|".into())
    })
}

/// `Delta(z) = sum tau(n) e(n z)` with `terms` coefficients.
pub fn delta_direct(tau: &[i128], x: f64, y: f64) -> Complex64 {
    let q = Complex64::from_polar((-2.0 * std::f64::consts::PI * y).exp(), 2.0 * std::f64::consts::PI * x);
    let mut acc = Complex64::new(0.0, 0.0);
    let mut qn = q;
    for &t in tau {
        acc += qn * t as f64;
        qn *= q;
    }
    acc
}

/// Midpoint Riemann sum of `y^12 |Delta|^2 dx dy / y^2` over the standard fundamental domain.
pub fn petersson_riemann(nx: usize, ny: usize) -> f64 {
    let tau = tau(40);
    let top = 7.0;
    let mut total = 0.0;
    let hx = 1.0 / nx as f64;
    for i in 0..nx {
        let x = -0.5 + (i as f64 + 0.5) * hx;
        let y0 = (1.0 - x * x).sqrt();
        let hy = (top - y0) / ny as f64;
        for j in 0..ny {
            let y = y0 + (j as f64 + 0.5) * hy;
            total += y.powi(10) * delta_direct(&tau, x, y).norm_sqr() * hx * hy;
        }
    }
    total
}

pub fn kappa_pairs() -> [(&'static str, &'static str); 2] {
    [("i", "i"), ("0.1+1.2i", "-0.3+0.9i")]
}

pub fn rel(a: Complex64, b: Complex64) -> f64 {
    (a - b).norm() / b.norm()
}
