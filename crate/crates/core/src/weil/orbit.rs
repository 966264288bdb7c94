//! Orbits of `1_R` under the local Weil representation of `SL_2(Z_p)`.

use std::collections::{BTreeSet, HashSet, VecDeque};

use num_integer::Integer;
use num_rational::Rational64;
use serde::{Deserialize, Serialize};

use super::cyclo::{ipow, Cyclo};
use super::model::{
    is_prime, weil_diag, weil_fourier, weil_lower_unipotent, weil_unipotent, FiniteModel, FiniteWeilFunction,
};
use crate::error::{domain, Error, Result};

/// Units of `Z / p^L`, or `{1}` when `L = 0`.
fn units(p: u32, l: u32) -> Vec<i64> {
    let m = ipow(p, l) as i64;
    if m == 1 {
        return vec![1];
    }
    (1..m).filter(|u| u % p as i64 != 0).collect()
}

/// Saturate `{seed}` under `n(1)`, `diag(u, 1/u)` for all units and `w`.
///
/// Elements are returned in breadth-first discovery order. More than
/// `10 p^(2n)` elements is reported as an error.
pub fn orbit_closure(seed: &FiniteWeilFunction) -> Result<Vec<FiniteWeilFunction>> {
    let model = &seed.model;
    let guard = 10 * ipow(model.p, 2 * model.n) as usize;
    let lams = units(model.p, model.cyclo_level());
    let mut seen: HashSet<FiniteWeilFunction> = HashSet::new();
    let mut order = Vec::new();
    let mut queue = VecDeque::new();
    seen.insert(seed.clone());
    order.push(seed.clone());
    queue.push_back(seed.clone());
    while let Some(f) = queue.pop_front() {
        let mut next = vec![weil_unipotent(&f, 1), weil_fourier(&f)];
        for &u in &lams[1..] {
            next.push(weil_diag(&f, u)?);
        }
        for g in next {
            if seen.insert(g.clone()) {
                if seen.len() > guard {
                    return Err(Error::Computation(format!("orbit exceeds {guard} elements in {model}")));
                }
                order.push(g.clone());
                queue.push_back(g);
            }
        }
    }
    Ok(order)
}

/// Which family of the predicted orbit a function belongs to.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(tag = "family", rename_all = "snake_case")]
pub enum OrbitLabel {
    /// `p^-(n-k) psi(u nu_{p^k}(x) / p^(n-k)) 1_{R^(p^k)}`, `0 < k <= n`.
    Unit { k: u32, u: u64 },
    /// `gamma p^-n psi(t Nr x) 1_R^`; for ramified models `n = 1`.
    Norm { t: u64 },
    /// `1_R` in a ramified model.
    Order,
}

impl OrbitLabel {
    /// `a` with support `R^(a)`: `p^k` for the unit family, `1` for the norm family
    /// and `p` for `1_R` at a ramified prime.
    pub fn lattice(&self, p: u32) -> u64 {
        match *self {
            OrbitLabel::Unit { k, .. } => ipow(p, k),
            OrbitLabel::Norm { .. } => 1,
            OrbitLabel::Order => p as u64,
        }
    }
}

/// The functions listed by the local orbit formulas, in the coordinates of `model`.
pub fn predicted_orbit_labeled(model: &FiniteModel) -> Result<Vec<(OrbitLabel, FiniteWeilFunction)>> {
    let (p, l, n) = (model.p, model.cyclo_level(), model.n);
    let mut out = Vec::new();
    if model.is_ramified() {
        out.push((OrbitLabel::Order, FiniteWeilFunction::indicator_order(model)));
        for t in 0..p as u64 {
            let f = FiniteWeilFunction::from_fn(model, |i| {
                Cyclo::from_ratio(p, l, -1, 1).mul_zeta((t * model.norm_phase(i)) as i64)
            });
            out.push((OrbitLabel::Norm { t }, f));
        }
        return Ok(out);
    }
    let q = ipow(p, n);
    for k in 1..=n {
        let pk = ipow(p, k);
        let rest = ipow(p, n - k);
        let to_l = ipow(p, l - (n - k)) as i64;
        for u in units(p, n - k) {
            let f = FiniteWeilFunction::from_fn(model, |i| {
                if !model.in_dual(i) {
                    return Cyclo::zero(p, l);
                }
                let (j1, j2) = model.jhat(i).expect("in the dual lattice");
                if j1 % pk != 0 || j2 % pk != 0 {
                    return Cyclo::zero(p, l);
                }
                let nu = (rest - (j1 / pk) * (j2 / pk) % rest) % rest;
                Cyclo::from_ratio(p, l, 1, n - k).mul_zeta(u * nu as i64 * to_l)
            });
            out.push((OrbitLabel::Unit { k, u: u as u64 }, f));
        }
    }
    for t in 0..q {
        let f = FiniteWeilFunction::from_fn(model, |i| {
            if !model.in_dual(i) {
                return Cyclo::zero(p, l);
            }
            Cyclo::from_ratio(p, l, 1, n).mul_zeta((t * model.norm_phase(i)) as i64)
        });
        out.push((OrbitLabel::Norm { t }, f));
    }
    Ok(out)
}

/// The predicted orbit as a set.
pub fn predicted_orbit(model: &FiniteModel) -> Result<BTreeSet<FiniteWeilFunction>> {
    Ok(predicted_orbit_labeled(model)?.into_iter().map(|(_, f)| f).collect())
}

/// `[SL_2(Z_p) : U_0(p^n)] = p^n + p^(n-1)`, and `1` for `n = 0`.
pub fn local_index(p: u32, n: u32) -> u64 {
    if n == 0 {
        1
    } else {
        ipow(p, n) + ipow(p, n - 1)
    }
}

/// Closure against prediction for one local order.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct LocalOrbitReport {
    pub p: u32,
    pub n: u32,
    pub ramified: bool,
    pub carrier: usize,
    pub orbit_size: usize,
    pub predicted_size: usize,
    pub index: u64,
    pub matches_prediction: bool,
}

/// Run [`orbit_closure`] from `1_R` and compare with [`predicted_orbit`].
pub fn local_orbit_report(model: &FiniteModel) -> Result<LocalOrbitReport> {
    let seed = FiniteWeilFunction::indicator_order(model);
    let orbit: BTreeSet<_> = orbit_closure(&seed)?.into_iter().collect();
    let predicted = predicted_orbit(model)?;
    Ok(LocalOrbitReport {
        p: model.p,
        n: model.n,
        ramified: model.is_ramified(),
        carrier: model.carrier_size(),
        orbit_size: orbit.len(),
        predicted_size: predicted.len(),
        index: if model.is_ramified() { model.p as u64 + 1 } else { local_index(model.p, model.n) },
        matches_prediction: orbit == predicted,
    })
}

/// Whether `f` is fixed by `n(1)`, every unit diagonal and `[[1, 0], [p^n, 1]]`.
pub fn fixed_by_u0(f: &FiniteWeilFunction) -> Result<bool> {
    let model = &f.model;
    if weil_unipotent(f, 1) != *f {
        return Ok(false);
    }
    for u in units(model.p, model.cyclo_level()) {
        if weil_diag(f, u)? != *f {
            return Ok(false);
        }
    }
    Ok(weil_lower_unipotent(f, ipow(model.p, model.n) as i64) == *f)
}

/// `j^(x) = (q b, c) mod q` for `x` in the dual `[[Z, q^-1 Z], [Z, Z]]` of the
/// Eichler order of level `q`.
pub fn jmap(x: &[[Rational64; 2]; 2], q: u64) -> Result<(u64, u64)> {
    if q == 0 {
        return domain("level must be positive");
    }
    let qi = q as i64;
    let [[a, b], [c, d]] = *x;
    let qb = b * qi;
    if !a.is_integer() || !c.is_integer() || !d.is_integer() || !qb.is_integer() {
        return domain(format!("{x:?} is not in the dual lattice of level {q}"));
    }
    Ok((qb.to_integer().rem_euclid(qi) as u64, c.to_integer().rem_euclid(qi) as u64))
}

/// `nu_m(x) = -(j^_1 / m)(j^_2 / m) mod q/m`, for `m | q` dividing both `j^` coordinates.
pub fn nu(x: &[[Rational64; 2]; 2], q: u64, m: u64) -> Result<u64> {
    if m == 0 || !q.is_multiple_of(m) {
        return domain(format!("{m} does not divide {q}"));
    }
    let (j1, j2) = jmap(x, q)?;
    if j1 % m != 0 || j2 % m != 0 {
        return domain(format!("j^ = ({j1}, {j2}) is not divisible by {m}"));
    }
    let r = (q / m) as i128;
    Ok((-((j1 / m) as i128) * ((j2 / m) as i128)).rem_euclid(r) as u64)
}

/// `sum_{alpha in F_{p^2}} psi(u N(alpha) / p)` with the norm of the unramified
/// quadratic extension, exactly.
pub fn norm_character_sum(p: u32, u: i64) -> Result<Cyclo> {
    if !is_prime(p) {
        return domain(format!("{p} is not prime"));
    }
    if u.rem_euclid(p as i64) == 0 {
        return domain(format!("{u} is not a unit mod {p}"));
    }
    let model = FiniteModel::ramified(p)?;
    // In the ramified model the norm phase of alpha is -N(alpha) mod p.
    Ok((0..model.carrier_size()).fold(Cyclo::zero(p, 1), |s, i| {
        s.add(&Cyclo::zeta_pow(p, 1, -(u * model.norm_phase(i) as i64)))
    }))
}

/// Versioned golden-file form of an orbit.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct OrbitGolden {
    pub version: u32,
    pub p: u32,
    pub n: u32,
    pub ramified: bool,
    pub model: FiniteModel,
    /// Each entry lists the values of one function in carrier order.
    pub entries: Vec<Vec<Cyclo>>,
}

impl OrbitGolden {
    pub const VERSION: u32 = 1;

    pub fn new(model: &FiniteModel, orbit: impl IntoIterator<Item = FiniteWeilFunction>) -> Self {
        let set: BTreeSet<_> = orbit.into_iter().collect();
        OrbitGolden {
            version: Self::VERSION,
            p: model.p,
            n: model.n,
            ramified: model.is_ramified(),
            model: model.clone(),
            entries: set.into_iter().map(|f| f.values).collect(),
        }
    }

    pub fn functions(&self) -> BTreeSet<FiniteWeilFunction> {
        self.entries.iter().map(|v| FiniteWeilFunction { model: self.model.clone(), values: v.clone() }).collect()
    }
}

pub(crate) fn gcd(a: u64, b: u64) -> u64 {
    a.gcd(&b)
}
