//! Exact arithmetic in `Z[zeta_{p^L}][1/p]`.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

/// `p^den`-scaled integer combination of the powers `zeta^k`, `k < phi(p^L)`,
/// with `zeta = e^(2 pi i / p^L)`.
///
/// The representation is canonical: coefficients are reduced modulo the
/// cyclotomic polynomial and `den` is as small as possible, so structural
/// equality is numerical equality.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Cyclo {
    p: u32,
    l: u32,
    den: u32,
    coeffs: Vec<i64>,
}

pub(crate) fn ipow(p: u32, e: u32) -> u64 {
    (p as u64).pow(e)
}

impl Cyclo {
    /// `p^L`, the order of `zeta`.
    pub fn order(p: u32, l: u32) -> usize {
        ipow(p, l) as usize
    }

    fn basis_len(p: u32, l: u32) -> usize {
        if l == 0 {
            1
        } else {
            (ipow(p, l) - ipow(p, l - 1)) as usize
        }
    }

    pub fn zero(p: u32, l: u32) -> Self {
        Cyclo { p, l, den: 0, coeffs: vec![0; Self::basis_len(p, l)] }
    }

    pub fn from_int(p: u32, l: u32, v: i64) -> Self {
        let mut c = Self::zero(p, l);
        c.coeffs[0] = v;
        c
    }

    /// `v / p^den`.
    pub fn from_ratio(p: u32, l: u32, v: i64, den: u32) -> Self {
        let mut r = vec![0i64; Self::order(p, l)];
        r[0] = v;
        Self::from_redundant(p, l, r, den)
    }

    /// `zeta^k`.
    pub fn zeta_pow(p: u32, l: u32, k: i64) -> Self {
        let n = Self::order(p, l);
        let mut r = vec![0i64; n];
        r[k.rem_euclid(n as i64) as usize] = 1;
        Self::from_redundant(p, l, r, 0)
    }

    /// Canonical form of `sum_k v[k] zeta^k / p^den` for a vector of length `p^L`.
    pub fn from_redundant(p: u32, l: u32, mut v: Vec<i64>, mut den: u32) -> Self {
        let n = Self::order(p, l);
        assert_eq!(v.len(), n);
        let phi = Self::basis_len(p, l);
        if l > 0 {
            let step = ipow(p, l - 1) as usize;
            for k in phi..n {
                let t = v[k];
                if t != 0 {
                    let k0 = k - phi;
                    for i in 0..(p as usize - 1) {
                        v[k0 + i * step] -= t;
                    }
                }
            }
        }
        v.truncate(phi);
        let pi = p as i64;
        if v.iter().all(|&c| c == 0) {
            den = 0;
        }
        while den > 0 && v.iter().all(|&c| c % pi == 0) {
            v.iter_mut().for_each(|c| *c /= pi);
            den -= 1;
        }
        Cyclo { p, l, den, coeffs: v }
    }

    pub fn prime(&self) -> u32 {
        self.p
    }

    pub fn level(&self) -> u32 {
        self.l
    }

    /// Exponent of the `p`-power denominator.
    pub fn denominator_exp(&self) -> u32 {
        self.den
    }

    pub fn coefficients(&self) -> &[i64] {
        &self.coeffs
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(|&c| c == 0)
    }

    /// Coefficients of length `p^L` over the common denominator `p^den`.
    pub(crate) fn redundant(&self, den: u32) -> Vec<i64> {
        assert!(den >= self.den);
        let s = (self.p as i64).pow(den - self.den);
        let mut v = vec![0i64; Self::order(self.p, self.l)];
        for (k, &c) in self.coeffs.iter().enumerate() {
            v[k] = c * s;
        }
        v
    }

    fn check(&self, other: &Self) {
        assert!(self.p == other.p && self.l == other.l, "cyclotomic rings differ");
    }

    pub fn add(&self, other: &Self) -> Self {
        self.check(other);
        let den = self.den.max(other.den);
        let mut v = self.redundant(den);
        for (a, b) in v.iter_mut().zip(other.redundant(den)) {
            *a += b;
        }
        Self::from_redundant(self.p, self.l, v, den)
    }

    pub fn neg(&self) -> Self {
        Cyclo { coeffs: self.coeffs.iter().map(|c| -c).collect(), ..self.clone() }
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.add(&other.neg())
    }

    pub fn mul(&self, other: &Self) -> Self {
        self.check(other);
        let n = Self::order(self.p, self.l);
        let mut v = vec![0i64; n];
        for (i, &a) in self.coeffs.iter().enumerate() {
            if a == 0 {
                continue;
            }
            for (j, &b) in other.coeffs.iter().enumerate() {
                v[(i + j) % n] += a * b;
            }
        }
        Self::from_redundant(self.p, self.l, v, self.den + other.den)
    }

    pub fn mul_int(&self, s: i64) -> Self {
        let r = self.redundant(self.den).into_iter().map(|c| c * s).collect();
        Self::from_redundant(self.p, self.l, r, self.den)
    }

    /// Division by `p^e`.
    pub fn div_p_pow(&self, e: u32) -> Self {
        Self::from_redundant(self.p, self.l, self.redundant(self.den), self.den + e)
    }

    /// Multiplication by `zeta^k`.
    pub fn mul_zeta(&self, k: i64) -> Self {
        let n = Self::order(self.p, self.l);
        let k = k.rem_euclid(n as i64) as usize;
        if k == 0 {
            return self.clone();
        }
        let mut v = vec![0i64; n];
        for (i, &c) in self.coeffs.iter().enumerate() {
            v[(i + k) % n] = c;
        }
        Self::from_redundant(self.p, self.l, v, self.den)
    }

    /// Complex conjugation, `zeta -> zeta^-1`.
    pub fn conj(&self) -> Self {
        let n = Self::order(self.p, self.l);
        let mut v = vec![0i64; n];
        for (i, &c) in self.coeffs.iter().enumerate() {
            v[(n - i) % n] = c;
        }
        Self::from_redundant(self.p, self.l, v, self.den)
    }

    /// `Some((v, den))` when the number is the rational `v / p^den`.
    pub fn as_rational(&self) -> Option<(i64, u32)> {
        self.coeffs[1..].iter().all(|&c| c == 0).then_some((self.coeffs[0], self.den))
    }

    pub fn to_complex(&self) -> Complex64 {
        let n = Self::order(self.p, self.l) as f64;
        let s: Complex64 = self
            .coeffs
            .iter()
            .enumerate()
            .filter(|(_, &c)| c != 0)
            .map(|(k, &c)| Complex64::from_polar(c as f64, 2.0 * std::f64::consts::PI * k as f64 / n))
            .sum();
        s / (self.p as f64).powi(self.den as i32)
    }
}
