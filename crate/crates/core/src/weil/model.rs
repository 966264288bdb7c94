//! Finite quotient models `Lambda_1 / Lambda_0` of a local quaternion algebra
//! and the Weil operators acting on functions on them.

use std::fmt;

use serde::{Deserialize, Serialize};

use super::cyclo::{ipow, Cyclo};
use crate::error::{domain, Error, Result};

/// Largest carrier handled.
pub const MAX_CARRIER: u64 = 1 << 24;

pub(crate) fn is_prime(p: u32) -> bool {
    p >= 2 && (2..).take_while(|d| d * d <= p).all(|d| !p.is_multiple_of(d))
}

/// Geometry of the carrier.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Geometry {
    /// `M_2(Q_p)` with coordinates `a in p^-s_a Z_p / p^s_d Z_p`,
    /// `b in p^-s_b / p^s_c`, `c in p^-s_c / p^s_b`, `d in p^-s_d / p^s_a`.
    Split { s: [u32; 4] },
    /// `R^ / R` with `R = O_E + j O_E`, `j^2 = p`, identified with `O_E / p`.
    /// `eps` generates `O_E` and has the given trace and norm.
    Ramified { eps_trace: i64, eps_norm: i64 },
}

/// A finite carrier together with the local order `R` it is built around:
/// the split Eichler order `[[Z_p, Z_p], [p^n Z_p, Z_p]]` or the maximal
/// order of the division algebra.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct FiniteModel {
    pub p: u32,
    /// Exponent of the level of `R`.
    pub n: u32,
    pub geometry: Geometry,
}

impl fmt::Display for FiniteModel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.geometry {
            Geometry::Split { s } => write!(f, "split p={} n={} s={:?}", self.p, self.n, s),
            Geometry::Ramified { .. } => write!(f, "ramified p={}", self.p),
        }
    }
}

fn check_prime(p: u32) -> Result<()> {
    if !is_prime(p) {
        return domain(format!("{p} is not prime"));
    }
    Ok(())
}

impl FiniteModel {
    /// Smallest model for the Eichler order of level `p^n`: carrier `R^ / R`.
    pub fn eichler(p: u32, n: u32) -> Result<Self> {
        Self::split(p, n, [0, n, 0, 0])
    }

    /// Carrier `p^-j M_2(Z_p) / p^j M_2(Z_p)` around the Eichler order of level `p^n`.
    pub fn box_model(p: u32, n: u32, j: u32) -> Result<Self> {
        Self::split(p, n, [j; 4])
    }

    pub fn split(p: u32, n: u32, s: [u32; 4]) -> Result<Self> {
        check_prime(p)?;
        if s[1] < n {
            return domain(format!("the carrier must contain p^-{n} in the b coordinate"));
        }
        let e = 2 * s.iter().sum::<u32>();
        if (p as f64).powi(e as i32) > MAX_CARRIER as f64 {
            return Err(Error::Unsupported(format!("carrier {p}^{e} exceeds {MAX_CARRIER} entries")));
        }
        Ok(FiniteModel { p, n, geometry: Geometry::Split { s } })
    }

    /// The maximal order of the ramified quaternion algebra over `Q_p`.
    pub fn ramified(p: u32) -> Result<Self> {
        check_prime(p)?;
        let (eps_trace, eps_norm) = if p == 2 {
            (-1, 1)
        } else {
            let euler = |r: u64| (0..(p - 1) / 2).fold(1u64, |acc, _| acc * r % p as u64);
            let r = (2..p as u64).find(|&r| euler(r) == p as u64 - 1).unwrap() as i64;
            (0, -r)
        };
        Ok(FiniteModel { p, n: 1, geometry: Geometry::Ramified { eps_trace, eps_norm } })
    }

    pub fn is_ramified(&self) -> bool {
        matches!(self.geometry, Geometry::Ramified { .. })
    }

    /// Sizes of the coordinate axes.
    pub fn axes(&self) -> Vec<usize> {
        match self.geometry {
            Geometry::Split { s } => {
                let ad = ipow(self.p, s[0] + s[3]) as usize;
                let bc = ipow(self.p, s[1] + s[2]) as usize;
                vec![ad, bc, bc, ad]
            }
            Geometry::Ramified { .. } => vec![self.p as usize, self.p as usize],
        }
    }

    pub fn carrier_size(&self) -> usize {
        self.axes().iter().product()
    }

    /// `L` such that every norm and pairing lies in `p^-L Z_p`.
    pub fn cyclo_level(&self) -> u32 {
        match self.geometry {
            Geometry::Split { s } => (s[0] + s[3]).max(s[1] + s[2]),
            Geometry::Ramified { .. } => 1,
        }
    }

    /// `gamma` of the Fourier operator.
    pub fn gamma(&self) -> i64 {
        if self.is_ramified() {
            -1
        } else {
            1
        }
    }

    /// `e` with `vol(Lambda_0) = |carrier|^(-1/2) = p^-e`.
    pub fn volume_exp(&self) -> u32 {
        match self.geometry {
            Geometry::Split { s } => s.iter().sum(),
            Geometry::Ramified { .. } => 1,
        }
    }

    pub fn decode(&self, idx: usize) -> Vec<u64> {
        let axes = self.axes();
        let mut out = vec![0u64; axes.len()];
        let mut r = idx;
        for k in (0..axes.len()).rev() {
            out[k] = (r % axes[k]) as u64;
            r /= axes[k];
        }
        out
    }

    pub fn encode(&self, coords: &[u64]) -> usize {
        let axes = self.axes();
        coords.iter().zip(&axes).fold(0, |acc, (&c, &n)| acc * n + (c as usize % n))
    }

    fn modulus(&self) -> u64 {
        ipow(self.p, self.cyclo_level())
    }

    /// Field norm of `b0 + b1 eps` in `O_E`.
    fn field_norm(&self, b: &[u64]) -> i64 {
        let Geometry::Ramified { eps_trace, eps_norm } = self.geometry else { unreachable!() };
        let (x, y) = (b[0] as i64, b[1] as i64);
        x * x + eps_trace * x * y + eps_norm * y * y
    }

    /// `k` in `Z / p^L` with `Nr x = k / p^L` mod `Z_p`.
    pub fn norm_phase(&self, idx: usize) -> u64 {
        let m = self.modulus() as i128;
        let c = self.decode(idx);
        let v: i128 = match self.geometry {
            Geometry::Split { s } => {
                let l = self.cyclo_level();
                let ad = (c[0] as i128) * (c[3] as i128) * ipow(self.p, l - s[0] - s[3]) as i128;
                let bc = (c[1] as i128) * (c[2] as i128) * ipow(self.p, l - s[1] - s[2]) as i128;
                ad - bc
            }
            Geometry::Ramified { .. } => -(self.field_norm(&c) as i128),
        };
        v.rem_euclid(m) as u64
    }

    /// `k` with `<x, y> = Nr(x+y) - Nr x - Nr y = k / p^L` mod `Z_p`.
    pub fn pairing_phase(&self, i: usize, j: usize) -> u64 {
        let x = self.decode(i);
        let y = self.decode(j);
        let sum: Vec<u64> = x.iter().zip(&y).zip(self.axes()).map(|((a, b), n)| (a + b) % n as u64).collect();
        let m = self.modulus() as i128;
        let v = self.norm_phase(self.encode(&sum)) as i128 - self.norm_phase(i) as i128 - self.norm_phase(j) as i128;
        v.rem_euclid(m) as u64
    }

    /// Index of `lam x`.
    pub fn scale_index(&self, idx: usize, lam: i64) -> usize {
        let c = self.decode(idx);
        let axes = self.axes();
        let scaled: Vec<u64> =
            c.iter().zip(&axes).map(|(&v, &n)| ((v as i128 * lam as i128).rem_euclid(n as i128)) as u64).collect();
        self.encode(&scaled)
    }

    /// Whether `x` lies in `R`.
    pub fn in_order(&self, idx: usize) -> bool {
        let c = self.decode(idx);
        match self.geometry {
            Geometry::Split { s } => {
                let p = self.p as u64;
                c[0].is_multiple_of(p.pow(s[0]))
                    && c[1].is_multiple_of(p.pow(s[1]))
                    && c[2].is_multiple_of(p.pow(s[2] + self.n))
                    && c[3].is_multiple_of(p.pow(s[3]))
            }
            Geometry::Ramified { .. } => c.iter().all(|&v| v == 0),
        }
    }

    /// Whether `x` lies in the dual lattice `R^`.
    pub fn in_dual(&self, idx: usize) -> bool {
        let c = self.decode(idx);
        match self.geometry {
            Geometry::Split { s } => {
                let p = self.p as u64;
                c[0].is_multiple_of(p.pow(s[0]))
                    && c[1].is_multiple_of(p.pow(s[1] - self.n))
                    && c[2].is_multiple_of(p.pow(s[2]))
                    && c[3].is_multiple_of(p.pow(s[3]))
            }
            Geometry::Ramified { .. } => true,
        }
    }

    /// `j^(x) = (p^n b, c) mod p^n` for `x` in `R^` of a split model.
    pub fn jhat(&self, idx: usize) -> Result<(u64, u64)> {
        let Geometry::Split { s } = self.geometry else {
            return Err(Error::Unsupported("j^ is defined for split models".into()));
        };
        if !self.in_dual(idx) {
            return domain("element is not in the dual lattice");
        }
        let c = self.decode(idx);
        let p = self.p as u64;
        let q = p.pow(self.n);
        Ok(((c[1] / p.pow(s[1] - self.n)) % q, (c[2] / p.pow(s[2])) % q))
    }
}

/// An exact function on the carrier of a [`FiniteModel`].
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct FiniteWeilFunction {
    pub model: FiniteModel,
    pub values: Vec<Cyclo>,
}

impl FiniteWeilFunction {
    pub fn from_fn(model: &FiniteModel, f: impl Fn(usize) -> Cyclo) -> Self {
        FiniteWeilFunction { model: model.clone(), values: (0..model.carrier_size()).map(f).collect() }
    }

    fn indicator(model: &FiniteModel, keep: impl Fn(usize) -> bool) -> Self {
        let (p, l) = (model.p, model.cyclo_level());
        Self::from_fn(model, |i| Cyclo::from_int(p, l, keep(i) as i64))
    }

    /// `1_R`.
    pub fn indicator_order(model: &FiniteModel) -> Self {
        Self::indicator(model, |i| model.in_order(i))
    }

    /// `1_R^`.
    pub fn indicator_dual(model: &FiniteModel) -> Self {
        Self::indicator(model, |i| model.in_dual(i))
    }

    pub fn value(&self, idx: usize) -> &Cyclo {
        &self.values[idx]
    }

    pub fn support_size(&self) -> usize {
        self.values.iter().filter(|v| !v.is_zero()).count()
    }

    /// `sum |M(x)|^2` over the carrier.
    pub fn l2_sq(&self) -> Cyclo {
        let (p, l) = (self.model.p, self.model.cyclo_level());
        self.values.iter().fold(Cyclo::zero(p, l), |s, v| s.add(&v.mul(&v.conj())))
    }
}

/// `rho(n(sigma)) M (x) = psi(sigma Nr x) M(x)`.
pub fn weil_unipotent(m: &FiniteWeilFunction, sigma: i64) -> FiniteWeilFunction {
    let model = &m.model;
    let modulus = ipow(model.p, model.cyclo_level()) as i128;
    let values = m
        .values
        .iter()
        .enumerate()
        .map(|(i, v)| {
            let k = (sigma as i128 * model.norm_phase(i) as i128).rem_euclid(modulus) as i64;
            v.mul_zeta(k)
        })
        .collect();
    FiniteWeilFunction { model: model.clone(), values }
}

/// `rho(diag(lam, 1/lam)) M (x) = M(lam x)` for a `p`-adic unit `lam`.
pub fn weil_diag(m: &FiniteWeilFunction, lam: i64) -> Result<FiniteWeilFunction> {
    if lam.rem_euclid(m.model.p as i64) == 0 {
        return Err(Error::Unsupported(format!("{lam} is not a {}-adic unit", m.model.p)));
    }
    let model = &m.model;
    Ok(FiniteWeilFunction::from_fn(model, |i| m.values[model.scale_index(i, lam)].clone()))
}

/// `rho(-I) M (x) = M(-x)`.
pub fn weil_negate(m: &FiniteWeilFunction) -> FiniteWeilFunction {
    weil_diag(m, -1).expect("-1 is a unit")
}

/// `rho(w) M = gamma vol(Lambda_0) sum_y M(y) psi(<x, y>)`, by direct summation.
pub fn weil_fourier_dense(m: &FiniteWeilFunction) -> FiniteWeilFunction {
    let model = &m.model;
    let (p, l) = (model.p, model.cyclo_level());
    let size = model.carrier_size();
    let den = m.values.iter().map(Cyclo::denominator_exp).max().unwrap_or(0);
    let inputs: Vec<(usize, Vec<i64>)> =
        m.values.iter().enumerate().filter(|(_, v)| !v.is_zero()).map(|(j, v)| (j, v.redundant(den))).collect();
    let order = Cyclo::order(p, l);
    let values = (0..size)
        .map(|i| {
            let mut acc = vec![0i64; order];
            for (j, r) in &inputs {
                let k = model.pairing_phase(i, *j) as usize;
                for (t, &c) in r.iter().enumerate() {
                    acc[(t + k) % order] += c;
                }
            }
            Cyclo::from_redundant(p, l, acc, den).mul_int(model.gamma()).div_p_pow(model.volume_exp())
        })
        .collect();
    FiniteWeilFunction { model: model.clone(), values }
}

/// `out[.., u, ..] = sum_t in[.., t, ..] zeta^(mult u t)` along one axis.
fn dft_axis(vals: &[Vec<i64>], axes: &[usize], axis: usize, mult: i64, order: usize) -> Vec<Vec<i64>> {
    let n = axes[axis];
    let stride: usize = axes[axis + 1..].iter().product();
    let mut out = vec![vec![0i64; order]; vals.len()];
    for base in 0..vals.len() {
        if !(base / stride).is_multiple_of(n) {
            continue;
        }
        for u in 0..n {
            let dst = &mut out[base + u * stride];
            for t in 0..n {
                let src = &vals[base + t * stride];
                let k = (mult * (u * t) as i64).rem_euclid(order as i64) as usize;
                for (e, &c) in src.iter().enumerate() {
                    if c != 0 {
                        dst[(e + k) % order] += c;
                    }
                }
            }
        }
    }
    out
}

/// `rho(w) M`, the Weil action of `w = [[0, 1], [-1, 0]]`.
pub fn weil_fourier(m: &FiniteWeilFunction) -> FiniteWeilFunction {
    let model = &m.model;
    let Geometry::Split { s } = model.geometry else {
        return weil_fourier_dense(m);
    };
    let (p, l) = (model.p, model.cyclo_level());
    let order = Cyclo::order(p, l);
    let axes = model.axes();
    let den = m.values.iter().map(Cyclo::denominator_exp).max().unwrap_or(0);
    let mut vals: Vec<Vec<i64>> = m.values.iter().map(|v| v.redundant(den)).collect();
    let k_ad = ipow(p, l - s[0] - s[3]) as i64;
    let k_bc = ipow(p, l - s[1] - s[2]) as i64;
    vals = dft_axis(&vals, &axes, 0, k_ad, order);
    vals = dft_axis(&vals, &axes, 3, k_ad, order);
    vals = dft_axis(&vals, &axes, 1, -k_bc, order);
    vals = dft_axis(&vals, &axes, 2, -k_bc, order);
    // The transform along `a` produced the `d` coordinate and vice versa.
    let size = vals.len();
    let mut swapped = vec![Vec::new(); size];
    for (i, v) in vals.into_iter().enumerate() {
        let c = model.decode(i);
        swapped[model.encode(&[c[3], c[2], c[1], c[0]])] = v;
    }
    let values = swapped
        .into_iter()
        .map(|v| Cyclo::from_redundant(p, l, v, den).div_p_pow(model.volume_exp()))
        .collect();
    FiniteWeilFunction { model: model.clone(), values }
}

/// `rho([[1, 0], [c, 1]]) = rho(w)^-1 rho(n(-c)) rho(w)`.
pub fn weil_lower_unipotent(m: &FiniteWeilFunction, c: i64) -> FiniteWeilFunction {
    let t = weil_unipotent(&weil_fourier(m), -c);
    weil_negate(&weil_fourier(&t))
}
