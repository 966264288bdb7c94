//! Integer matrices of prescribed determinant inside u-balls.
//!
//! The engine enumerates `xi` in an order with `||L xi R||_F^2 <= bound` by
//! Fincke-Pohst over the Gram form in coordinates `(d, a, b, c/q)`. The
//! `d` coordinate is innermost so that determinant constraints reduce the
//! innermost interval to at most one value once `a != 0`.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{domain, Error, Result};
use crate::halfplane::{Frame, Mat2R, Mat2Z};

const LIMIT: f64 = 4.611_686_018_427_388e18; // 2^62

/// Which integer lattice of matrices is enumerated.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum OrderSpec {
    Full,
    EichlerSplit { q: u64 },
}

impl OrderSpec {
    pub fn eichler(q: u64) -> Result<Self> {
        if q == 0 {
            return domain("Eichler level must be positive");
        }
        Ok(if q == 1 { OrderSpec::Full } else { OrderSpec::EichlerSplit { q } })
    }

    pub fn level(&self) -> u64 {
        match self {
            OrderSpec::Full => 1,
            OrderSpec::EichlerSplit { q } => *q,
        }
    }

    pub fn contains(&self, xi: &Mat2Z) -> bool {
        xi.c.rem_euclid(self.level() as i64) == 0
    }

    /// The same order after `xi -> xi^T`: lower-left divisibility moves to the upper right.
    pub fn is_transpose_stable(&self) -> bool {
        self.level() == 1
    }

    fn from_coords(&self, x: &[i64; 4]) -> Mat2Z {
        Mat2Z::new(x[1], x[2], x[3] * self.level() as i64, x[0])
    }
}

impl std::fmt::Display for OrderSpec {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            OrderSpec::Full => write!(f, "full"),
            OrderSpec::EichlerSplit { q } => write!(f, "eichler:{q}"),
        }
    }
}

impl std::str::FromStr for OrderSpec {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        if s == "full" {
            return Ok(OrderSpec::Full);
        }
        let q = s
            .strip_prefix("eichler:")
            .and_then(|q| q.parse::<u64>().ok())
            .ok_or_else(|| Error::Domain(format!("order must be 'full' or 'eichler:q', got {s:?}")))?;
        OrderSpec::eichler(q)
    }
}

/// Ellipsoid `{x in Z^4 : Q(x) <= bound}` in LDL form, ready for enumeration.
#[derive(Clone, Debug)]
pub struct Ellipsoid {
    diag: [f64; 4],
    upper: [[f64; 4]; 4],
    bound: f64,
}

impl Ellipsoid {
    /// Quadratic form `xi -> ||L xi R||_F^2` restricted to `order`.
    pub fn new(order: OrderSpec, l: &Mat2R, r: &Mat2R, bound: f64) -> Result<Self> {
        if !(bound > 0.0 && bound.is_finite()) {
            return domain(format!("bound must be positive and finite, got {bound}"));
        }
        if l.det() == 0.0 || r.det() == 0.0 || !l.is_finite() || !r.is_finite() {
            return domain("L and R must be invertible");
        }
        let q = order.level() as f64;
        let basis = [
            Mat2R::new(0.0, 0.0, 0.0, 1.0),
            Mat2R::new(1.0, 0.0, 0.0, 0.0),
            Mat2R::new(0.0, 1.0, 0.0, 0.0),
            Mat2R::new(0.0, 0.0, q, 0.0),
        ];
        let v: Vec<[f64; 4]> = basis
            .iter()
            .map(|e| {
                let m = *l * *e * *r;
                [m.a, m.b, m.c, m.d]
            })
            .collect();
        let mut g = [[0.0; 4]; 4];
        for i in 0..4 {
            for j in 0..4 {
                g[i][j] = (0..4).map(|k| v[i][k] * v[j][k]).sum();
            }
        }
        // LDL^T by quadratic supplement.
        for i in 0..4 {
            if g[i][i] <= 0.0 {
                return domain("Gram form is not positive definite");
            }
            for j in i + 1..4 {
                g[j][i] = g[i][j];
                g[i][j] /= g[i][i];
            }
            for k in i + 1..4 {
                for l2 in k..4 {
                    g[k][l2] -= g[k][i] * g[i][l2];
                }
            }
        }
        let mut diag = [0.0; 4];
        let mut upper = [[0.0; 4]; 4];
        for i in 0..4 {
            diag[i] = g[i][i];
            for j in i + 1..4 {
                upper[i][j] = g[i][j];
            }
        }
        Ok(Ellipsoid { diag, upper, bound: bound * (1.0 + 1e-9) + 1e-9 })
    }

    fn interval(&self, i: usize, x: &[i64; 4], budget: f64) -> Result<(i64, i64, f64)> {
        let center: f64 = -(i + 1..4).map(|j| self.upper[i][j] * x[j] as f64).sum::<f64>();
        let rad = (budget.max(0.0) / self.diag[i]).sqrt();
        let (lo, hi) = ((center - rad).ceil(), (center + rad).floor());
        if lo.abs() > LIMIT || hi.abs() > LIMIT || !lo.is_finite() || !hi.is_finite() {
            return Err(Error::Overflow("enumeration interval exceeds 2^62, shrink the bound".into()));
        }
        Ok((lo as i64, hi as i64, center))
    }

    /// Range of the outermost coordinate.
    fn outer_range(&self) -> Result<(i64, i64)> {
        let (lo, hi, _) = self.interval(3, &[0; 4], self.bound)?;
        Ok((lo, hi))
    }

    /// Walk all `(a, b, c)` prefixes with a fixed outermost value, calling
    /// `leaf(prefix, d_lo, d_hi)` with the admissible `d` interval.
    fn walk_slice<F>(&self, c: i64, leaf: &mut F) -> Result<()>
    where
        F: FnMut(&[i64; 4], i64, i64),
    {
        let mut x = [0i64; 4];
        x[3] = c;
        let (_, _, c3) = self.interval(3, &x, self.bound)?;
        let t3 = self.bound - self.diag[3] * (c as f64 - c3).powi(2);
        if t3 < 0.0 {
            return Ok(());
        }
        let (lo2, hi2, _) = self.interval(2, &x, t3)?;
        for b in lo2..=hi2 {
            x[2] = b;
            let c2 = -self.upper[2][3] * c as f64;
            let t2 = t3 - self.diag[2] * (b as f64 - c2).powi(2);
            if t2 < 0.0 {
                continue;
            }
            let (lo1, hi1, c1) = self.interval(1, &x, t2)?;
            for a in lo1..=hi1 {
                x[1] = a;
                let t1 = t2 - self.diag[1] * (a as f64 - c1).powi(2);
                if t1 < 0.0 {
                    continue;
                }
                let (lo0, hi0, _) = self.interval(0, &x, t1)?;
                if lo0 <= hi0 {
                    leaf(&x, lo0, hi0);
                }
            }
        }
        Ok(())
    }

    /// Parallel map over outermost slices, merged in slice order.
    fn map_slices<T, F, G>(&self, init: G, leaf: F) -> Result<Vec<T>>
    where
        T: Send,
        G: Fn() -> T + Sync,
        F: Fn(&mut T, &[i64; 4], i64, i64) + Sync,
    {
        let (lo, hi) = self.outer_range()?;
        (lo..=hi)
            .into_par_iter()
            .map(|c| {
                let mut acc = init();
                self.walk_slice(c, &mut |x, l, h| leaf(&mut acc, x, l, h))?;
                Ok(acc)
            })
            .collect()
    }
}

/// All `xi` in `order` with `||L xi R||_F^2 <= bound`, sorted.
pub fn enumerate_constrained(order: OrderSpec, l: &Mat2R, r: &Mat2R, bound: f64) -> Result<Vec<Mat2Z>> {
    let e = Ellipsoid::new(order, l, r, bound)?;
    let slices = e.map_slices(Vec::new, |out: &mut Vec<Mat2Z>, x, lo, hi| {
        for d in lo..=hi {
            let xi = order.from_coords(&[d, x[1], x[2], x[3]]);
            if (*l * xi.to_real() * *r).frobenius_sq() <= bound {
                out.push(xi);
            }
        }
    })?;
    let mut all: Vec<Mat2Z> = slices.into_iter().flatten().collect();
    all.sort();
    Ok(all)
}

/// Candidates `d` in `[lo, hi]` with `a d - b c` in `[n_lo, n_hi]`.
fn det_candidates(a: i64, bc: i64, lo: i64, hi: i64, n_lo: i64, n_hi: i64) -> (i64, i64) {
    use num_integer::Integer;
    if a == 0 {
        return if (n_lo..=n_hi).contains(&-bc) { (lo, hi) } else { (1, 0) };
    }
    let (p, q) = (n_lo + bc, n_hi + bc);
    let (dl, dh) = if a > 0 { (Integer::div_ceil(&p, &a), Integer::div_floor(&q, &a)) } else { (Integer::div_ceil(&q, &a), Integer::div_floor(&p, &a)) };
    (dl.max(lo), dh.min(hi))
}

/// Visit every `xi` in `order` with `det xi` in `[n_lo, n_hi]` and
/// `||L xi R||_F^2 <= bound`; each outermost slice folds into its own
/// accumulator and the accumulators come back in slice order.
pub fn fold_by_det<T, G, F>(
    order: OrderSpec,
    l: &Mat2R,
    r: &Mat2R,
    bound: f64,
    n_lo: i64,
    n_hi: i64,
    init: G,
    visit: F,
) -> Result<Vec<T>>
where
    T: Send,
    G: Fn() -> T + Sync,
    F: Fn(&mut T, Mat2Z, i64) + Sync,
{
    let e = Ellipsoid::new(order, l, r, bound)?;
    e.map_slices(init, |acc, x, lo, hi| {
        let xi0 = order.from_coords(&[0, x[1], x[2], x[3]]);
        let bc = xi0.b.checked_mul(xi0.c).expect("entries bounded by enumeration");
        let (dl, dh) = det_candidates(xi0.a, bc, lo, hi, n_lo, n_hi);
        for d in dl..=dh {
            let xi = Mat2Z { d, ..xi0 };
            visit(acc, xi, xi.det());
        }
    })
}

/// Parameters of one counting query `M(g, n; delta)`.
#[derive(Clone, Debug)]
pub struct CountQuery {
    pub order: OrderSpec,
    pub frame: Frame,
    pub n: u64,
    pub delta: f64,
}

impl CountQuery {
    fn validate(&self) -> Result<()> {
        if self.n == 0 {
            return domain("norm n must be positive");
        }
        check_delta(self.delta)
    }
}

fn check_delta(delta: f64) -> Result<()> {
    if !(delta >= 0.0 && delta.is_finite()) {
        return domain(format!("delta must be finite and non-negative, got {delta}"));
    }
    Ok(())
}

/// `#{xi in order : det xi = n, u(g^-1 xi g) <= delta}`.
pub fn count_norm_ball(q: &CountQuery) -> Result<u64> {
    q.validate()?;
    let p = count_profile_range(q.order, &q.frame, q.n, q.n, q.delta)?;
    Ok(p[0])
}

/// The counts `M(g, n; delta)` for `n = 1..=N`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CountProfile {
    pub order: OrderSpec,
    pub delta: f64,
    pub horizon: u64,
    pub counts: Vec<u64>,
}

impl CountProfile {
    /// Count at norm `n` (1-based).
    pub fn at(&self, n: u64) -> u64 {
        self.counts[(n - 1) as usize]
    }
}

/// Counts for every `n <= horizon` from a single enumeration bucketed by determinant.
pub fn count_profile(order: OrderSpec, frame: &Frame, horizon: u64, delta: f64) -> Result<CountProfile> {
    if horizon == 0 {
        return domain("horizon N must be at least 1");
    }
    check_delta(delta)?;
    let counts = count_profile_range(order, frame, 1, horizon, delta)?;
    Ok(CountProfile { order, delta, horizon, counts })
}

fn count_profile_range(order: OrderSpec, frame: &Frame, n_lo: u64, n_hi: u64, delta: f64) -> Result<Vec<u64>> {
    let len = (n_hi - n_lo + 1) as usize;
    let bound = n_hi as f64 * (4.0 * delta + 2.0);
    let parts = fold_by_det(
        order,
        &frame.inverse_matrix(),
        &frame.matrix(),
        bound,
        n_lo as i64,
        n_hi as i64,
        || vec![0u64; len],
        |acc, xi, det| {
            if frame.u_within(&xi, det, delta) {
                acc[(det - n_lo as i64) as usize] += 1;
            }
        },
    )?;
    let mut counts = vec![0u64; len];
    for part in parts {
        for (c, p) in counts.iter_mut().zip(part) {
            *c += p;
        }
    }
    Ok(counts)
}

/// Pair counts at each `n` split by whether `|Tr xi1| = |Tr xi2|`.
///
/// Returns `(equal, different)` with `equal + different = M(g, n; delta)^2`.
pub fn trace_split_pairs(order: OrderSpec, frame: &Frame, horizon: u64, delta: f64) -> Result<Vec<(u64, u64)>> {
    if horizon == 0 {
        return domain("horizon N must be at least 1");
    }
    check_delta(delta)?;
    let bound = horizon as f64 * (4.0 * delta + 2.0);
    let parts = fold_by_det(
        order,
        &frame.inverse_matrix(),
        &frame.matrix(),
        bound,
        1,
        horizon as i64,
        std::collections::BTreeMap::<(i64, i64), u64>::new,
        |acc, xi, det| {
            if frame.u_within(&xi, det, delta) {
                *acc.entry((det, (xi.a + xi.d).abs())).or_insert(0) += 1;
            }
        },
    )?;
    let mut by_trace = std::collections::BTreeMap::<(i64, i64), u64>::new();
    for part in parts {
        for (k, v) in part {
            *by_trace.entry(k).or_insert(0) += v;
        }
    }
    let mut out = vec![(0u64, 0u64); horizon as usize];
    let mut totals = vec![0u64; horizon as usize];
    for ((n, _), v) in by_trace {
        out[(n - 1) as usize].0 += v * v;
        totals[(n - 1) as usize] += v;
    }
    for (o, t) in out.iter_mut().zip(totals) {
        o.1 = t * t - o.0;
    }
    Ok(out)
}

/// Weights for [`second_moment`].
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Weighting {
    Uniform,
    Reciprocal,
    /// `exp(-n/A) / n`.
    ExpTail { a: f64 },
}

/// `sum_n w_n M(g, n; delta)^2`.
pub fn second_moment(p: &CountProfile, weighting: Weighting) -> f64 {
    p.counts
        .iter()
        .enumerate()
        .map(|(i, &c)| {
            let n = (i + 1) as f64;
            let w = match weighting {
                Weighting::Uniform => 1.0,
                Weighting::Reciprocal => 1.0 / n,
                Weighting::ExpTail { a } => (-n / a).exp() / n,
            };
            w * (c as f64) * (c as f64)
        })
        .sum()
}

/// `N^(3+eps) delta^2 + N + N^(1/2+eps) min(N^(1/2), (N delta)^(1/2) + 1) (y^2 N delta + 1)`.
pub fn split_bound_rhs(n: f64, delta: f64, y: f64, eps: f64) -> f64 {
    let nd = n * delta;
    n.powf(3.0 + eps) * delta * delta
        + n
        + n.powf(0.5 + eps) * n.sqrt().min(nd.sqrt() + 1.0) * (y * y * nd + 1.0)
}

/// Least-squares slope of `log y` against `log x`.
pub fn fitted_exponent(points: &[(f64, f64)]) -> f64 {
    let k = points.len() as f64;
    let (sx, sy) = points.iter().fold((0.0, 0.0), |(a, b), (x, y)| (a + x.ln(), b + y.ln()));
    let (mx, my) = (sx / k, sy / k);
    let (num, den) = points.iter().fold((0.0, 0.0), |(n, d), (x, y)| {
        let dx = x.ln() - mx;
        (n + dx * (y.ln() - my), d + dx * dx)
    });
    num / den
}
