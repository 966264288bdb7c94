//! Numeric evaluators for the spectral lower bound and the geometric upper
//! bound of the theta kernel's L2 norm. Implied constants are taken as 1.

use serde::{Deserialize, Serialize};
use statrs::function::gamma::{gamma_ur, ln_gamma};

use super::petersson::{petersson_norm, Convention};
use super::qexp::{eval_level_one, required_terms, QExpansion, DIM_ONE_WEIGHTS};
use crate::error::{domain, Error, Result};
use crate::halfplane::{Frame, Point};
use crate::lattice::{fold_by_det, OrderSpec};

/// Counts `M(g, n; delta)` for `n = 1..` at a single `delta`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BoundProfile {
    pub delta: f64,
    pub counts: Vec<u64>,
}

fn check_dim_one(m: u32) -> Result<()> {
    if !DIM_ONE_WEIGHTS.contains(&m) {
        return Err(Error::Unsupported(format!("weight {m} is not one of {DIM_ONE_WEIGHTS:?}")));
    }
    Ok(())
}

/// `log ||f_M||^2 = log sum_n |a(n)|^2 int_{sqrt3/2}^inf y^(m-2) e^(-4 pi n y) dy`.
fn log_siegel_parseval(f: &QExpansion) -> f64 {
    let m = f.weight.get() as f64;
    let y0 = 3f64.sqrt() / 2.0;
    let lg = ln_gamma(m - 1.0);
    let mut logs = Vec::new();
    for n in 1..=f.len() {
        let a = f.coefficient(n).norm_sqr();
        if a == 0.0 {
            continue;
        }
        let x = 4.0 * std::f64::consts::PI * n as f64;
        let q = gamma_ur(m - 1.0, x * y0);
        if q <= 0.0 {
            break;
        }
        let t = a.ln() + lg + q.ln() - (m - 1.0) * x.ln();
        if let Some(&first) = logs.first() {
            if t < first - 80.0 {
                break;
            }
        }
        logs.push(t);
    }
    log_sum_exp(&logs)
}

fn log_sum_exp(v: &[f64]) -> f64 {
    let hi = v.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    hi + v.iter().map(|t| (t - hi).exp()).sum::<f64>().ln()
}

/// Parts of the spectral lower bound, all logarithms natural.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SpectralBound {
    pub value: f64,
    pub log_value: f64,
    pub petersson: f64,
    pub abs_f: f64,
    pub log_siegel_norm: f64,
}

/// `(8 pi/(m-1))^2 y^(2m) ||f_M||^2 |f(z)|^4 / <f,f>^2` for the eigenform of weight `m`.
pub fn spectral_lower_bound(z: &Point, m: u32, convention: Convention) -> Result<SpectralBound> {
    check_dim_one(m)?;
    let terms = required_terms(m, 3f64.sqrt() / 2.0)?.max(60);
    let f = QExpansion::eigenform(m, terms)?;
    let pet = petersson_norm(&f, convention)?;
    let abs_f = eval_level_one(&f, z)?.norm();
    if abs_f == 0.0 {
        return Err(Error::Computation("f(z) vanishes at this point".into()));
    }
    let ls = log_siegel_parseval(&f);
    let mf = m as f64;
    let log_value = 2.0 * (8.0 * std::f64::consts::PI / (mf - 1.0)).ln() + 2.0 * mf * z.y.ln() + ls + 4.0 * abs_f.ln()
        - 2.0 * pet.ln();
    Ok(SpectralBound { value: log_value.exp(), log_value, petersson: pet, abs_f, log_siegel_norm: ls })
}

/// `(qD_B) Gamma(m-1)/(4 pi)^m { sum_k S(delta_k) [(1+delta_k)^(-m/2) - (1+delta_{k+1})^(-m/2)] }^2`
/// with `S = [sum_{n<=A m} M^2/n]^(1/2) + [sum_{n>A m} e^(-n/A) M^2/n]^(1/2)`, `A = (qD_B)^2`.
///
/// Counts are step functions of `delta`, so on each grid interval the value
/// at the left endpoint is used; the result is exact when the grid contains
/// every jump. The last interval extends to infinity with constant counts.
pub fn geometric_upper_bound(m: u32, level: u64, profiles: &[BoundProfile]) -> Result<f64> {
    if m <= 2 {
        return domain("the geometric bound needs m > 2");
    }
    if level == 0 {
        return domain("level qD_B must be positive");
    }
    let Some(first) = profiles.first() else {
        return domain("at least one profile is required");
    };
    if first.delta != 0.0 {
        return domain("the delta grid must start at 0");
    }
    if profiles.windows(2).any(|w| !(w[1].delta > w[0].delta)) {
        return domain("the delta grid must be strictly increasing");
    }
    let half = m as f64 / 2.0;
    let last = profiles.last().unwrap().delta;
    if (1.0 + last).powf(-half) >= 1e-12 {
        return domain(format!("delta grid ends at {last}, need (1+delta)^(-m/2) < 1e-12"));
    }
    let a = (level * level) as f64;
    let weight = |p: &BoundProfile| -> f64 {
        let (mut lo, mut hi) = (0.0, 0.0);
        for (k, &c) in p.counts.iter().enumerate() {
            let n = (k + 1) as f64;
            let c2 = (c as f64) * (c as f64);
            if n <= a * m as f64 {
                lo += c2 / n;
            } else {
                hi += (-n / a).exp() * c2 / n;
            }
        }
        lo.sqrt() + hi.sqrt()
    };
    let mut integral = 0.0;
    for (k, p) in profiles.iter().enumerate() {
        let left = (1.0 + p.delta).powf(-half);
        let right = profiles.get(k + 1).map_or(0.0, |q| (1.0 + q.delta).powf(-half));
        integral += weight(p) * (left - right);
    }
    let log_pref = (level as f64).ln() + ln_gamma(m as f64 - 1.0) - m as f64 * (4.0 * std::f64::consts::PI).ln();
    Ok(log_pref.exp() * integral * integral)
}

/// Result of the geometric upper bound evaluated along every jump of the counts.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GeometricBound {
    pub value: f64,
    pub horizon: u64,
    pub delta_max: f64,
    pub jumps: u64,
    pub elements: u64,
}

/// The geometric upper bound at `z` with the exact jump grid of `M(g, n; delta)`.
///
/// Norms run up to `A (m + tail)` with `A = q^2`, where the weights
/// `e^(-n/A)` have decayed by `e^(-m-tail)`, and `delta` up to the first
/// value with `(1+delta)^(-m/2) < 1e-12`.
pub fn geometric_bound_pipeline(z: &Point, m: u32, order: OrderSpec, tail: u64) -> Result<GeometricBound> {
    if m <= 2 {
        return domain("the geometric bound needs m > 2");
    }
    let q = order.level();
    let a = q * q;
    let horizon = a * (m as u64 + tail);
    let half = m as f64 / 2.0;
    let delta_max = (1e-12f64.powf(-1.0 / half) - 1.0) * (1.0 + 1e-9);
    let frame = Frame::from_point(z);
    let bound = horizon as f64 * (4.0 * delta_max + 2.0);
    let parts = fold_by_det(
        order,
        &frame.inverse_matrix(),
        &frame.matrix(),
        bound,
        1,
        horizon as i64,
        Vec::new,
        |acc: &mut Vec<(f64, u32)>, xi, det| {
            let u = frame.u(&xi).expect("det > 0");
            if u <= delta_max {
                acc.push((if u < 1e-12 { 0.0 } else { u }, det as u32));
            }
        },
    )?;
    let mut events: Vec<(f64, u32)> = parts.into_iter().flatten().collect();
    events.sort_by(|x, y| x.0.total_cmp(&y.0).then(x.1.cmp(&y.1)));
    let elements = events.len() as u64;

    let cut = a as f64 * m as f64;
    let af = a as f64;
    let mut counts = vec![0u64; horizon as usize + 1];
    let (mut lo, mut hi) = (0.0f64, 0.0f64);
    let mut integral = 0.0;
    let mut current = 0.0f64;
    let mut jumps = 0u64;
    let mut i = 0;
    while i < events.len() {
        let u = events[i].0;
        if u > current {
            integral += (lo.sqrt() + hi.sqrt()) * ((1.0 + current).powf(-half) - (1.0 + u).powf(-half));
            current = u;
        }
        while i < events.len() && events[i].0 == u {
            let n = events[i].1 as usize;
            let c = counts[n] as f64;
            let nf = n as f64;
            let inc = (2.0 * c + 1.0) / nf;
            if nf <= cut {
                lo += inc;
            } else {
                hi += (-nf / af).exp() * inc;
            }
            counts[n] += 1;
            i += 1;
        }
        jumps += 1;
    }
    integral += (lo.sqrt() + hi.sqrt()) * (1.0 + current).powf(-half);
    let log_pref = (q as f64).ln() + ln_gamma(m as f64 - 1.0) - m as f64 * (4.0 * std::f64::consts::PI).ln();
    Ok(GeometricBound { value: log_pref.exp() * integral * integral, horizon, delta_max, jumps, elements })
}
