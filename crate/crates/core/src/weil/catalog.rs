//! The `SL_2(Z^)`-orbit of `1_R` for an Eichler order in a quaternion algebra
//! over `Q`, assembled from the local orbits.

use num_rational::Rational64;
use serde::{Deserialize, Serialize};

use super::orbit::gcd;
use crate::error::{domain, Result};

/// Prime factorization by trial division.
pub fn factorize(mut n: u64) -> Vec<(u64, u32)> {
    let mut out = Vec::new();
    let mut d = 2;
    while d * d <= n {
        if n.is_multiple_of(d) {
            let mut e = 0;
            while n.is_multiple_of(d) {
                n /= d;
                e += 1;
            }
            out.push((d, e));
        }
        d += 1;
    }
    if n > 1 {
        out.push((n, 1));
    }
    out
}

fn divisors(n: u64) -> Vec<u64> {
    let mut v: Vec<u64> = (1..).take_while(|d| d * d <= n).filter(|d| n.is_multiple_of(*d)).flat_map(|d| [d, n / d]).collect();
    v.sort_unstable();
    v.dedup();
    v
}

/// One lattice `R^(a)` of the orbit with its phase ranges.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CatalogEntry {
    pub a: u64,
    pub a1: u64,
    pub a2: u64,
    /// `a (-1)^omega(D_B / gcd(a, D_B)) / (q D_B)` as `"num/den"`.
    pub coefficient: String,
    /// Range `Z / (q D_B / a1)` of the unit parameter.
    pub u_modulus: u64,
    /// Range `Z / (q D_B / a2)` of the second parameter.
    pub t_modulus: u64,
    /// `(q D_B / a) rho(a | q D_B)`.
    pub multiplicity: u64,
    /// Product of the local orbit counts supported on the matching local lattices.
    pub local_multiplicity: u64,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct OrbitCatalog {
    pub q: u64,
    pub d_b: u64,
    /// `[SL_2(Z^) : U_R] = q D_B prod_{p | q D_B} (1 + 1/p)`.
    pub index: u64,
    pub entries: Vec<CatalogEntry>,
}

impl OrbitCatalog {
    pub fn total(&self) -> u64 {
        self.entries.iter().map(|e| e.multiplicity).sum()
    }
}

/// Number of functions in the local orbit at `p` supported on `R^(p^k)`:
/// the level `p^n` when `ramified` is false, else `n = 1` at a ramified prime.
pub fn local_multiplicity(p: u64, n: u32, k: u32, ramified: bool) -> u64 {
    if ramified {
        return if k == 0 { p } else { 1 };
    }
    match k {
        0 => p.pow(n),
        k if k == n => 1,
        k => p.pow(n - k) - p.pow(n - k - 1),
    }
}

/// The catalog of lattices `R^(a)`, `a | q D_B`, and their multiplicities.
pub fn global_orbit(q: u64, d_b: u64) -> Result<OrbitCatalog> {
    if q == 0 || d_b == 0 {
        return domain("q and D_B must be positive");
    }
    if gcd(q, d_b) != 1 {
        return domain(format!("gcd(q, D_B) = gcd({q}, {d_b}) is not 1"));
    }
    let db_f = factorize(d_b);
    if db_f.iter().any(|&(_, e)| e > 1) {
        return domain(format!("D_B = {d_b} is not squarefree"));
    }
    let level = q * d_b;
    let primes = factorize(level);
    let index = primes.iter().fold(level, |acc, &(p, _)| acc / p * (p + 1));
    let mut entries = Vec::new();
    for a in divisors(level) {
        let a2 = divisors(a).into_iter().filter(|&d| gcd(level / d, a) == 1).max().unwrap_or(1);
        let a1 = a / a2;
        let rest = level / a;
        let shared = factorize(gcd(rest, a));
        let multiplicity = shared.iter().fold(rest, |acc, &(p, _)| acc / p * (p - 1));
        let local_multiplicity = primes
            .iter()
            .map(|&(p, n)| {
                let k = factorize(a).iter().find(|f| f.0 == p).map_or(0, |f| f.1);
                local_multiplicity(p, n, k, d_b.is_multiple_of(p))
            })
            .product();
        let omega = factorize(d_b / gcd(a, d_b)).len() as u32;
        let sign = if omega.is_multiple_of(2) { 1 } else { -1 };
        let coefficient = Rational64::new(sign * a as i64, level as i64);
        entries.push(CatalogEntry {
            a,
            a1,
            a2,
            coefficient: coefficient.to_string(),
            u_modulus: level / a1,
            t_modulus: level / a2,
            multiplicity,
            local_multiplicity,
        });
    }
    Ok(OrbitCatalog { q, d_b, index, entries })
}
