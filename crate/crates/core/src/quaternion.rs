//! Norm and `u`-ball counts in the division order `{(a, D_B b; b^s, a^s)}` with
//! `a, b` in an imaginary quadratic ring.

use std::fmt;
use std::str::FromStr;

use num_rational::Rational64;
use num_traits::ToPrimitive;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{domain, Error, Result};
use crate::halfplane::f64_to_decimal_ratio;

/// Largest scan accepted by [`count_quat`].
pub const MAX_CANDIDATES: f64 = 1e9;

fn is_squarefree(n: u64) -> bool {
    (2..).take_while(|d| d * d <= n).all(|d| !n.is_multiple_of(d * d))
}

fn primes_of(mut n: u64) -> Vec<u64> {
    let mut out = Vec::new();
    let mut d = 2;
    while d * d <= n {
        if n.is_multiple_of(d) {
            out.push(d);
            while n.is_multiple_of(d) {
                n /= d;
            }
        }
        d += 1;
    }
    if n > 1 {
        out.push(n);
    }
    out
}

/// `x + y w` in `O_E`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct QuadInt {
    pub x: i64,
    pub y: i64,
}

impl QuadInt {
    pub const fn new(x: i64, y: i64) -> Self {
        QuadInt { x, y }
    }
}

impl fmt::Display for QuadInt {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}{:+}w", self.x, self.y)
    }
}

/// `E = Q(sqrt D_E)` with `O_E = Z[w]`, `w = (1 + sqrt D_E)/2` or `sqrt(D_E/4)`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "i64", into = "i64")]
pub struct ImagQuadField {
    d: i64,
    /// `Tr w`.
    tr: i64,
    /// `Nr w`.
    nr: i64,
}

impl TryFrom<i64> for ImagQuadField {
    type Error = Error;
    fn try_from(d: i64) -> Result<Self> {
        ImagQuadField::new(d)
    }
}

impl From<ImagQuadField> for i64 {
    fn from(f: ImagQuadField) -> i64 {
        f.d
    }
}

impl ImagQuadField {
    pub fn new(d: i64) -> Result<Self> {
        if d >= 0 {
            return domain(format!("D_E = {d} is not negative"));
        }
        let m = -d as u64;
        let fundamental = match d.rem_euclid(4) {
            1 => is_squarefree(m),
            0 => {
                let k = d / 4;
                matches!(k.rem_euclid(4), 2 | 3) && is_squarefree(-k as u64)
            }
            _ => false,
        };
        if !fundamental {
            return domain(format!("D_E = {d} is not a fundamental discriminant"));
        }
        Ok(if d.rem_euclid(4) == 1 {
            ImagQuadField { d, tr: 1, nr: (1 - d) / 4 }
        } else {
            ImagQuadField { d, tr: 0, nr: -d / 4 }
        })
    }

    pub fn discriminant(&self) -> i64 {
        self.d
    }

    /// `Nr(x + y w) = x^2 + Tr(w) x y + Nr(w) y^2`.
    pub fn norm(&self, a: QuadInt) -> i64 {
        a.x * a.x + self.tr * a.x * a.y + self.nr * a.y * a.y
    }

    /// Real and imaginary parts under `sqrt D_E -> i sqrt|D_E|`.
    pub fn embed(&self, a: QuadInt) -> (f64, f64) {
        let im_w = (-self.d as f64).sqrt() / 2.0;
        (a.x as f64 + a.y as f64 * self.tr as f64 / 2.0, a.y as f64 * im_w)
    }

    /// Whether the prime `p` is inert in `E`.
    pub fn is_inert(&self, p: u64) -> bool {
        if p == 2 {
            return self.d.rem_euclid(8) == 5;
        }
        let pi = p as i64;
        let r = self.d.rem_euclid(pi);
        if r == 0 {
            return false;
        }
        (0..(p - 1) / 2).fold(1i64, |acc, _| acc * r % pi) == pi - 1
    }

    /// Number of `a` in `O_E` with `Nr a = m`.
    pub fn representations(&self, m: u64) -> u64 {
        let target = m as i64;
        let ymax = ((4.0 * m as f64 / -self.d as f64).sqrt()).floor() as i64 + 1;
        (-ymax..=ymax).map(|y| self.solve_x(y, target).len() as u64).sum()
    }

    /// All `x` with `Nr(x + y w) = target`.
    fn solve_x(&self, y: i64, target: i64) -> Vec<i64> {
        // (2x + tr y)^2 = 4 target - |D| y^2
        let disc = 4 * target + self.d * y * y;
        if disc < 0 {
            return Vec::new();
        }
        let s = disc.isqrt();
        if s * s != disc {
            return Vec::new();
        }
        let mut out = Vec::new();
        for r in [-s, s] {
            let t = r - self.tr * y;
            if t % 2 == 0 && !out.contains(&(t / 2)) {
                out.push(t / 2);
            }
        }
        out
    }
}

/// Which lattice of pairs `(a, b)` is counted.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum LatticeChoice {
    /// `a, b` in `O_E`.
    Suborder,
    /// `a, b` in the inverse different `D_E^-1/2 O_E` with `a + b` in `O_E`.
    DualLattice,
}

impl FromStr for LatticeChoice {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "suborder" => Ok(LatticeChoice::Suborder),
            "dual" | "dual_lattice" => Ok(LatticeChoice::DualLattice),
            _ => domain(format!("unknown lattice {s:?}, expected suborder or dual")),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct DivisionOrderModel {
    pub field: ImagQuadField,
    pub d_b: u64,
    pub lattice: LatticeChoice,
}

impl DivisionOrderModel {
    pub fn new(field: ImagQuadField, d_b: u64, lattice: LatticeChoice) -> Result<Self> {
        if d_b == 0 || !is_squarefree(d_b) {
            return domain(format!("D_B = {d_b} is not a positive squarefree integer"));
        }
        if let Some(p) = primes_of(d_b).into_iter().find(|&p| !field.is_inert(p)) {
            return domain(format!("{p} divides D_B but is not inert in Q(sqrt {})", field.d));
        }
        if lattice == LatticeChoice::DualLattice && field.d.rem_euclid(4) != 1 {
            return Err(Error::Unsupported("the dual lattice needs an odd discriminant".into()));
        }
        Ok(DivisionOrderModel { field, d_b, lattice })
    }

    /// `D_E = -19`, `D_B = 6` on the suborder.
    pub fn standard() -> Self {
        DivisionOrderModel::new(ImagQuadField::new(-19).unwrap(), 6, LatticeChoice::Suborder).unwrap()
    }

    /// `(a, b)` stands for `(a, b) / sqrt D_E` in the dual lattice, so norms scale by this.
    fn scale(&self) -> i64 {
        match self.lattice {
            LatticeChoice::Suborder => 1,
            LatticeChoice::DualLattice => -self.field.d,
        }
    }

    /// Complex coordinates of the element represented by `a`.
    fn embed(&self, a: QuadInt) -> (f64, f64) {
        let (re, im) = self.field.embed(a);
        match self.lattice {
            LatticeChoice::Suborder => (re, im),
            LatticeChoice::DualLattice => {
                let s = (self.scale() as f64).sqrt();
                (im / s, -re / s)
            }
        }
    }

    /// Whether `(a, b)` represents an element of the lattice.
    fn admissible(&self, a: QuadInt, b: QuadInt) -> bool {
        match self.lattice {
            LatticeChoice::Suborder => true,
            LatticeChoice::DualLattice => {
                // O_E / sqrt(D) O_E = Z/|D| with w -> 1/2.
                let m = -self.field.d;
                let half = (m + 1) / 2;
                ((a.x + b.x) + half * (a.y + b.y)).rem_euclid(m) == 0
            }
        }
    }
}

/// `Nr a - D_B Nr b`.
pub fn quat_norm(field: &ImagQuadField, a: QuadInt, b: QuadInt, d_b: u64) -> i64 {
    field.norm(a) - d_b as i64 * field.norm(b)
}

/// `D_B Nr b / |Nr a - D_B Nr b|`.
pub fn quat_u(field: &ImagQuadField, a: QuadInt, b: QuadInt, d_b: u64) -> Result<Rational64> {
    let n = quat_norm(field, a, b, d_b);
    if n == 0 {
        return domain("u is undefined at norm 0");
    }
    Ok(Rational64::new(d_b as i64 * field.norm(b), n.abs()))
}

/// `g h = k_2 a_E k_1` with `a_E` of eigenvalues `lambda, 1/lambda`; `theta`
/// is the angle by which `k_2` rotates the `b` coordinate.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct CartanParams {
    pub lambda: f64,
    pub theta: f64,
}

impl CartanParams {
    pub fn new(lambda: f64, theta: f64) -> Result<Self> {
        if !(lambda >= 1.0 && lambda.is_finite() && theta.is_finite()) {
            return domain(format!("need lambda >= 1, got {lambda}"));
        }
        Ok(CartanParams { lambda, theta })
    }

    pub fn identity() -> Self {
        CartanParams { lambda: 1.0, theta: 0.0 }
    }

    fn cosh_sinh(&self) -> (f64, f64) {
        let l = self.lambda;
        ((l + 1.0 / l) / 2.0, (l - 1.0 / l) / 2.0)
    }
}

/// `D_B Nr(b~)` where `(a~, b~)` are the coordinates of `(gh)^-1 xi (gh)`.
fn twisted_b_norm(model: &DivisionOrderModel, c: &CartanParams, a: QuadInt, b: QuadInt) -> f64 {
    let (_, ia) = model.embed(a);
    let (rb, ib) = model.embed(b);
    let (sin, cos) = c.theta.sin_cos();
    let (rb, ib) = (rb * cos - ib * sin, rb * sin + ib * cos);
    let rd = (model.d_b as f64).sqrt();
    let (ch, sh) = c.cosh_sinh();
    let ib_t = sh * ia + ch * rd * ib;
    model.d_b as f64 * rb * rb + ib_t * ib_t
}

/// Number of lattice elements `xi` with `Nr xi = n` and `u((gh)^-1 xi (gh)) <= delta`.
///
/// For `lambda = 1` the test is the exact `D_B Nr b <= delta n`; otherwise it is
/// evaluated in floating point with relative slack `1e-12`.
pub fn count_quat(model: &DivisionOrderModel, cartan: &CartanParams, n: u64, delta: f64) -> Result<u64> {
    if n == 0 {
        return domain("norm n must be positive");
    }
    if !(delta >= 0.0 && delta.is_finite()) {
        return domain(format!("delta must be a non-negative number, got {delta}"));
    }
    let field = model.field;
    let scale = model.scale();
    let target_n = (n as i64).checked_mul(scale).ok_or_else(|| Error::Overflow("norm too large".into()))?;
    let nf = n as f64;
    let db = model.d_b as f64;
    let (ch, sh) = cartan.cosh_sinh();
    let slack = 1e-12;
    // Box from D_B |b~|^2 <= delta n and |Im a~|^2 <= n (1 + 2 delta).
    let ima_t = (nf * (1.0 + 2.0 * delta)).sqrt();
    let imb_t = (delta * nf).sqrt();
    let b_abs = ((delta * nf / db) + ((sh * ima_t + ch * imb_t) / db.sqrt()).powi(2)).sqrt();
    let im_a = ch * ima_t + sh * imb_t;
    let (b_abs, a_lim) = match model.lattice {
        LatticeChoice::Suborder => (b_abs, im_a),
        LatticeChoice::DualLattice => {
            let s = (scale as f64).sqrt();
            (b_abs * s, s * (nf + db * b_abs * b_abs).sqrt())
        }
    };
    let b_abs = b_abs * (1.0 + slack) + 1e-9;
    let a_lim = a_lim * (1.0 + slack) + 1e-9;
    let im_w = (-field.d as f64).sqrt() / 2.0;
    let yb_max = (b_abs / im_w).floor() as i64;
    let ya_max = (a_lim / im_w).floor() as i64;
    let xb_span = 2.0 * b_abs + 2.0;
    let candidates = (2 * yb_max + 1) as f64 * xb_span * (2 * ya_max + 1) as f64;
    if candidates > MAX_CANDIDATES {
        return Err(Error::Overflow(format!("{candidates:.3e} candidates exceed {MAX_CANDIDATES:e}")));
    }
    let exact = cartan.lambda == 1.0;
    // floor(delta n) over the lattice scale, exactly.
    let cap = {
        let r = f64_to_decimal_ratio(delta) * num_bigint::BigInt::from(target_n);
        r.floor().to_integer().to_i64().unwrap_or(i64::MAX)
    };
    let tr = field.tr as f64;
    let total: u64 = (-yb_max..=yb_max)
        .into_par_iter()
        .map(|yb| {
            let mut count = 0u64;
            let center = -(yb as f64) * tr / 2.0;
            let lo = (center - b_abs).floor() as i64;
            let hi = (center + b_abs).ceil() as i64;
            for xb in lo..=hi {
                let b = QuadInt::new(xb, yb);
                let nb = field.norm(b);
                let dnb = model.d_b as i64 * nb;
                if exact && dnb > cap {
                    continue;
                }
                let na = target_n + dnb;
                for ya in -ya_max..=ya_max {
                    for xa in field.solve_x(ya, na) {
                        let a = QuadInt::new(xa, ya);
                        if !model.admissible(a, b) {
                            continue;
                        }
                        if exact || twisted_b_norm(model, cartan, a, b) <= delta * n as f64 * (1.0 + slack) + slack {
                            count += 1;
                        }
                    }
                }
            }
            count
        })
        .sum();
    Ok(total)
}

/// Counts for `n = 1..=horizon`.
pub fn quat_profile(model: &DivisionOrderModel, cartan: &CartanParams, horizon: u64, delta: f64) -> Result<Vec<u64>> {
    (1..=horizon).map(|n| count_quat(model, cartan, n, delta)).collect()
}

/// `|D_E|^(2+eps) N^eps [N^3 delta^2 + (lambda + 1/lambda)^(2+eps) (N^(5/2) delta^(3/2) + N)]`
/// for `delta < 1`, and `sum_{n <= N} (((lambda + 1/lambda) n)^(1+eps) delta)^2` otherwise.
pub fn division_bound_rhs(n: f64, delta: f64, lambda: f64, d_e: i64, eps: f64) -> f64 {
    let l = lambda + 1.0 / lambda;
    if delta < 1.0 {
        let de = (d_e.unsigned_abs() as f64).powf(2.0 + eps);
        de * n.powf(eps)
            * (n.powi(3) * delta * delta + l.powf(2.0 + eps) * (n.powf(2.5) * delta.powf(1.5) + n))
    } else {
        (1..=n.floor() as u64).map(|k| ((l * k as f64).powf(1.0 + eps) * delta).powi(2)).sum()
    }
}
