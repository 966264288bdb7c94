//! q-expansions of level one cusp forms and their evaluation.

use num_complex::Complex64;
use num_rational::BigRational;
use num_traits::ToPrimitive;
use serde::{Deserialize, Serialize};

use crate::error::{domain, Error, Result};
use crate::halfplane::{big, ratio_to_f64, reduce_to_fundamental, Point, Weight};

/// Weights whose level one cusp space is one-dimensional.
pub const DIM_ONE_WEIGHTS: [u32; 6] = [12, 16, 18, 20, 22, 26];

/// Fourier coefficients `a(1), a(2), ...` of a cusp form of weight `m`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct QExpansion {
    pub weight: Weight,
    /// `coeffs[k]` is `a(k + 1)`.
    pub coeffs: Vec<Complex64>,
}

impl QExpansion {
    pub fn new(weight: Weight, coeffs: Vec<Complex64>) -> Self {
        QExpansion { weight, coeffs }
    }

    pub fn from_integers(weight: Weight, coeffs: &[i128]) -> Self {
        QExpansion::new(weight, coeffs.iter().map(|&c| Complex64::new(c as f64, 0.0)).collect())
    }

    /// The discriminant `Delta = q prod (1 - q^n)^24`.
    pub fn delta(terms: usize) -> Self {
        QExpansion::from_integers(Weight::new(12).unwrap(), &delta_coefficients(terms))
    }

    /// The normalized eigenform spanning `S_m(SL_2(Z))` for `m` in [`DIM_ONE_WEIGHTS`].
    pub fn eigenform(m: u32, terms: usize) -> Result<Self> {
        let coeffs = eigenform_coefficients(m, terms)?;
        Ok(QExpansion::from_integers(Weight::new(m)?, &coeffs))
    }

    pub fn len(&self) -> usize {
        self.coeffs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn coefficient(&self, n: usize) -> Complex64 {
        self.coeffs[n - 1]
    }

    pub fn scale(&self, c: Complex64) -> Self {
        QExpansion::new(self.weight, self.coeffs.iter().map(|a| a * c).collect())
    }
}

fn poly_mul(x: &[i128], y: &[i128], len: usize) -> Result<Vec<i128>> {
    let overflow = || Error::Overflow(format!("q-expansion coefficients exceed i128 at {len} terms"));
    let mut out = vec![0i128; len];
    for (i, &a) in x.iter().enumerate().take(len) {
        if a == 0 {
            continue;
        }
        for (j, &b) in y.iter().enumerate().take(len - i) {
            let t = a.checked_mul(b).ok_or_else(overflow)?;
            out[i + j] = out[i + j].checked_add(t).ok_or_else(overflow)?;
        }
    }
    Ok(out)
}

/// `tau(1..=N)` from the truncated product `q prod_{k>=1} (1 - q^k)^24`.
pub fn delta_coefficients(terms: usize) -> Vec<i128> {
    if terms == 0 {
        return Vec::new();
    }
    let mut p = vec![0i128; terms];
    p[0] = 1;
    for k in 1..terms {
        for i in (k..terms).rev() {
            p[i] -= p[i - k];
        }
    }
    let mul = |x: &[i128], y: &[i128]| poly_mul(x, y, terms).expect("tau(n) fits in i128 for desk-scale n");
    let p2 = mul(&p, &p);
    let p4 = mul(&p2, &p2);
    let p8 = mul(&p4, &p4);
    let p16 = mul(&p8, &p8);
    mul(&p16, &p8)
}

/// `E_k = 1 + c_k sum sigma_{k-1}(n) q^n` for `k` in `{4, 6}`, coefficients `0..terms`.
pub fn eisenstein_coefficients(k: u32, terms: usize) -> Result<Vec<i128>> {
    let c: i128 = match k {
        4 => 240,
        6 => -504,
        _ => return Err(Error::Unsupported(format!("Eisenstein series of weight {k}"))),
    };
    let mut e = vec![0i128; terms];
    if terms > 0 {
        e[0] = 1;
    }
    for d in 1..terms {
        let dk = (d as i128).pow(k - 1);
        for n in (d..terms).step_by(d) {
            e[n] += c * dk;
        }
    }
    Ok(e)
}

/// Coefficients `a(1..=terms)` of the normalized eigenform of weight `m`.
pub fn eigenform_coefficients(m: u32, terms: usize) -> Result<Vec<i128>> {
    let (e4, e6) = match m {
        12 => (0, 0),
        16 => (1, 0),
        18 => (0, 1),
        20 => (2, 0),
        22 => (1, 1),
        26 => (2, 1),
        _ => return Err(Error::Unsupported(format!("weight {m} does not have a one-dimensional cusp space"))),
    };
    let mut f = delta_coefficients(terms);
    let e4s = eisenstein_coefficients(4, terms)?;
    let e6s = eisenstein_coefficients(6, terms)?;
    for _ in 0..e4 {
        f = poly_mul(&f, &e4s, terms)?;
    }
    for _ in 0..e6 {
        f = poly_mul(&f, &e6s, terms)?;
    }
    Ok(f)
}

/// `log` of the crude bound `n^(m/2) d(n) e^(-2 pi n y)` with `d(n) <= 2 sqrt n`.
fn log_term_bound(m: u32, n: usize, y: f64) -> f64 {
    let n = n as f64;
    (m as f64 / 2.0 + 0.5) * n.ln() + 2f64.ln() - 2.0 * std::f64::consts::PI * n * y
}

/// Number of coefficients needed so the tail is below `1e-14 e^(-2 pi y)`.
pub fn required_terms(m: u32, y: f64) -> Result<usize> {
    if y <= 0.0 {
        return domain("height must be positive");
    }
    let target = 1e-14f64.ln() - 2.0 * std::f64::consts::PI * y;
    // Terms decrease once n > (m+1)/(4 pi y); from there the tail is at most
    // the next term over (1 - ratio).
    let peak = ((m as f64 + 1.0) / (4.0 * std::f64::consts::PI * y)).ceil() as usize + 1;
    let ratio = (-2.0 * std::f64::consts::PI * y).exp() * (1.0 + 1.0 / peak as f64).powf(m as f64 / 2.0 + 0.5);
    let mut n = 1usize;
    loop {
        let next = log_term_bound(m, n + 1, y);
        if n + 1 >= peak && ratio < 1.0 && next - (1.0 - ratio).ln() < target {
            return Ok(n);
        }
        n += 1;
        if n > 10_000_000 {
            return Err(Error::Computation(format!("height {y} needs too many coefficients")));
        }
    }
}

/// Fractional part of `x`, exact when the point is rational.
fn frac_x(z: &Point) -> f64 {
    match z.exact() {
        Some((x, _)) => ratio_to_f64(&(x - x.floor())),
        None => z.x - z.x.floor(),
    }
}

/// `sum a(n) e^(2 pi i n z)`; requires `Im z >= 0.05` and enough coefficients.
pub fn eval_cusp_form(f: &QExpansion, z: &Point) -> Result<Complex64> {
    if z.y < 0.05 {
        return domain(format!("direct evaluation needs Im z >= 0.05, got {}", z.y));
    }
    let needed = required_terms(f.weight.get(), z.y)?;
    if f.len() < needed {
        return Err(Error::InsufficientCoefficients { needed, have: f.len() });
    }
    let x = frac_x(z);
    let tau = 2.0 * std::f64::consts::PI;
    let mut acc = Complex64::new(0.0, 0.0);
    for n in (1..=needed).rev() {
        let a = f.coefficient(n);
        if a.re == 0.0 && a.im == 0.0 {
            continue;
        }
        let phase = ((n as f64) * x).fract();
        acc += a * Complex64::from_polar((-tau * n as f64 * z.y).exp(), tau * phase);
    }
    Ok(acc)
}

/// `c z + d`, exact for rational points.
pub(crate) fn automorphy(c: i64, d: i64, z: &Point) -> Complex64 {
    match z.exact() {
        Some((x, y)) => {
            let re: BigRational = big(c) * x + big(d);
            let im: BigRational = big(c) * y;
            Complex64::new(re.to_f64().unwrap_or(f64::NAN), im.to_f64().unwrap_or(f64::NAN))
        }
        None => Complex64::new(c as f64 * z.x + d as f64, c as f64 * z.y),
    }
}

/// Evaluate a level one form anywhere in the upper half-plane via
/// `f(z) = (c z + d)^(-m) f(gamma z)` with `gamma z` reduced.
pub fn eval_level_one(f: &QExpansion, z: &Point) -> Result<Complex64> {
    let r = reduce_to_fundamental(z);
    let j = automorphy(r.gamma.c, r.gamma.d, z);
    Ok(eval_cusp_form(f, &r.point)? * j.powi(-(f.weight.get() as i32)))
}
