//! Geometric kernel sums `S(n; z, w) = sum_{det xi = n} mu(g_z^-1 xi g_w)^m`.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::qexp::DIM_ONE_WEIGHTS;
use crate::error::{domain, Error, Result};
use crate::halfplane::{mu, point_matrix, Point, Weight};
use crate::lattice::{fold_by_det, OrderSpec};

/// Truncation parameters for [`kernel_sum`].
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct KernelSumParams {
    pub m: Weight,
    /// Absolute bound on the discarded tail.
    pub tol: f64,
}

impl KernelSumParams {
    pub fn new(m: u32, tol: f64) -> Result<Self> {
        let m = Weight::new(m)?;
        if m.get() <= 4 {
            return Err(Error::Unsupported(format!("kernel sums diverge for weight {} <= 4", m.get())));
        }
        if !(tol > 0.0 && tol.is_finite()) {
            return domain(format!("tolerance must be positive, got {tol}"));
        }
        Ok(KernelSumParams { m, tol })
    }

    /// Radius `u_max` with `192 sigma(n) (1 + u_max)^(1 - m/2) / (m - 2) < tol`.
    ///
    /// Elements of determinant `n` with `u <= U` number about `24 sigma(n) U`,
    /// and each contributes `(1 + u)^(-m/2)` in absolute value.
    pub fn u_max(&self, n: u64) -> f64 {
        let m = self.m.get() as f64;
        let s = sigma1(n) as f64;
        (192.0 * s / ((m - 2.0) * self.tol)).powf(1.0 / (m / 2.0 - 1.0)) - 1.0
    }
}

fn sigma1(n: u64) -> u64 {
    (1..=n).filter(|d| n.is_multiple_of(*d)).sum()
}

/// Truncated `sum_{xi in order, det xi = n} mu(g_z^-1 xi g_w)^m`.
pub fn kernel_sum(n: u64, z: &Point, w: &Point, p: &KernelSumParams, order: OrderSpec) -> Result<Complex64> {
    if p.m.get() <= 4 {
        return Err(Error::Unsupported(format!("kernel sums diverge for weight {} <= 4", p.m.get())));
    }
    if n == 0 {
        return domain("norm n must be positive");
    }
    let l = point_matrix(z).inverse()?;
    let r = point_matrix(w);
    let big_u = p.u_max(n);
    let nf = n as f64;
    let bound = nf * (4.0 * big_u + 2.0);
    let m = p.m.get() as i32;
    let parts = fold_by_det(
        order,
        &l,
        &r,
        bound,
        n as i64,
        n as i64,
        || Complex64::new(0.0, 0.0),
        |acc, xi, _| {
            let h = l * xi.to_real() * r;
            if h.frobenius_sq() <= bound {
                *acc += mu(&h).powi(m);
            }
        },
    )?;
    Ok(parts.into_iter().fold(Complex64::new(0.0, 0.0), |s, v| s + v))
}

/// `kappa(n) = S(n; z, w) / S(1; z, w)` for one-dimensional level one cusp spaces.
pub fn hecke_ratio(n: u64, z: &Point, w: &Point, p: &KernelSumParams) -> Result<Complex64> {
    if !DIM_ONE_WEIGHTS.contains(&p.m.get()) {
        return Err(Error::Unsupported(format!(
            "Hecke ratios need a one-dimensional cusp space, weight {} is not one of {DIM_ONE_WEIGHTS:?}",
            p.m.get()
        )));
    }
    let s1 = kernel_sum(1, z, w, p, OrderSpec::Full)?;
    if s1.norm() < 1e3 * p.tol {
        return Err(Error::Computation("S(1) vanishes: node of the form, move the point".into()));
    }
    if n == 1 {
        return Ok(Complex64::new(1.0, 0.0));
    }
    Ok(kernel_sum(n, z, w, p, OrderSpec::Full)? / s1)
}

/// The `n`-th Fourier coefficient `n^(m/2-1) S(n; z, w)` of the theta kernel.
pub fn theta_coefficient(n: u64, z: &Point, w: &Point, p: &KernelSumParams, order: OrderSpec) -> Result<Complex64> {
    let e = p.m.get() as f64 / 2.0 - 1.0;
    Ok(kernel_sum(n, z, w, p, order)? * (n as f64).powf(e))
}
