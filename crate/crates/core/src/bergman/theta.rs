//! Elementary theta series from Hecke cosets and the horocycle L2 norm of the
//! theta kernel.

use num_complex::Complex64;
use num_rational::BigRational;

use super::kernel::{theta_coefficient, KernelSumParams};
use super::qexp::{eval_level_one, QExpansion};
use crate::error::{domain, Error, Result};
use crate::halfplane::{big, Point};
use crate::lattice::OrderSpec;

/// The point `(a z + b) / d` with its real part reduced mod 1, plus a sort key.
fn coset_point(z: &Point, a: i64, b: i64, d: i64) -> Result<(Point, f64)> {
    match z.exact() {
        Some((x, y)) => {
            let xr: BigRational = (big(a) * x + big(b)) / big(d);
            let xr = &xr - xr.floor();
            let key = crate::halfplane::ratio_to_f64(&xr);
            let yr = big(a) * y / big(d);
            Ok((Point::from_rational(xr, yr)?, key))
        }
        None => {
            let xr = (a as f64 * z.x + b as f64) / d as f64;
            Ok((Point::new(xr - xr.floor(), a as f64 * z.y / d as f64)?, b as f64))
        }
    }
}

/// `c(n) = n^(m/2-1) sum_{ad=n, 0<=b<d} (f|_m [[a,b],[0,d]])(z)` for `n = 1..=N`,
/// with `(f|_m alpha)(z) = det(alpha)^(m/2) (c z + d)^(-m) f(alpha z)`.
///
/// For rational `z` the coset terms are summed in order of the exact reduced
/// real part, so `z` and `z + 1` give bit-identical results.
pub fn elementary_theta_coeffs(f: &QExpansion, z: &Point, horizon: usize) -> Result<Vec<Complex64>> {
    let m = f.weight.get() as i32;
    let mut out = Vec::with_capacity(horizon);
    for n in 1..=horizon as i64 {
        let mut terms = Vec::new();
        for d in (1..=n).filter(|d| n % d == 0) {
            let a = n / d;
            let scale = (n as f64).powf(m as f64 / 2.0) * (d as f64).powi(-m);
            for b in 0..d {
                let (w, key) = coset_point(z, a, b, d)?;
                terms.push((d, key, w, scale));
            }
        }
        terms.sort_by(|x, y| x.0.cmp(&y.0).then(x.1.total_cmp(&y.1)));
        let mut acc = Complex64::new(0.0, 0.0);
        for (_, _, w, scale) in &terms {
            acc += eval_level_one(f, w)? * *scale;
        }
        out.push(acc * (n as f64).powf(m as f64 / 2.0 - 1.0));
    }
    Ok(out)
}

/// `sum_n |theta_n|^2 e^(-4 pi n tau2)` for coefficients `theta_1, theta_2, ...`.
pub fn horocycle_l2_from_coefficients(theta: &[Complex64], tau2: f64) -> f64 {
    theta
        .iter()
        .enumerate()
        .map(|(k, t)| t.norm_sqr() * (-4.0 * std::f64::consts::PI * (k + 1) as f64 * tau2).exp())
        .sum()
}

/// `int_0^1 |theta(z, z; t + i tau2)|^2 dt` by Parseval over `n <= N`.
///
/// Fails when the first omitted term is not below `1e-14` of the sum.
pub fn theta_horocycle_l2(z: &Point, p: &KernelSumParams, tau2: f64, horizon: u64) -> Result<f64> {
    if !(tau2 > 0.0) {
        return domain("tau2 must be positive");
    }
    if horizon == 0 {
        return domain("horizon must be at least 1");
    }
    let theta: Vec<Complex64> = (1..=horizon + 1)
        .map(|n| theta_coefficient(n, z, z, p, OrderSpec::Full))
        .collect::<Result<_>>()?;
    let total = horocycle_l2_from_coefficients(&theta[..horizon as usize], tau2);
    let next = horocycle_l2_from_coefficients(&theta, tau2) - total;
    if next >= 1e-14 * total {
        return Err(Error::Convergence(format!(
            "term {} is {next:e} against a sum of {total:e}; raise N",
            horizon + 1
        )));
    }
    Ok(total)
}

/// Direct evaluation of `sum_n theta_n e(n (t + i tau2))`.
pub fn theta_series_at(theta: &[Complex64], t: f64, tau2: f64) -> Complex64 {
    let tau = 2.0 * std::f64::consts::PI;
    theta
        .iter()
        .enumerate()
        .map(|(k, c)| {
            let n = (k + 1) as f64;
            c * Complex64::from_polar((-tau * n * tau2).exp(), tau * (n * t).fract())
        })
        .sum()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bergman::qexp::delta_coefficients;

    #[test]
    fn first_coefficient_is_f() {
        let f = QExpansion::delta(60);
        let z: Point = "0.2+0.7i".parse().unwrap();
        let c = elementary_theta_coeffs(&f, &z, 1).unwrap();
        assert!((c[0] - eval_level_one(&f, &z).unwrap()).norm() < 1e-25);
    }

    #[test]
    fn hecke_factorization_small() {
        let f = QExpansion::delta(60);
        let z: Point = "0.1+0.9i".parse().unwrap();
        let dz = eval_level_one(&f, &z).unwrap();
        let c = elementary_theta_coeffs(&f, &z, 8).unwrap();
        for (k, tau) in delta_coefficients(8).into_iter().enumerate() {
            let expect = dz * tau as f64;
            assert!((c[k] - expect).norm() / expect.norm() < 1e-10, "n={}", k + 1);
        }
    }

    #[test]
    fn single_coefficient_l2() {
        let th = [Complex64::new(0.0, 0.0), Complex64::new(3.0, 4.0)];
        let v = horocycle_l2_from_coefficients(&th, 0.5);
        assert!((v - 25.0 * (-4.0 * std::f64::consts::PI).exp()).abs() < 1e-18);
    }
}
