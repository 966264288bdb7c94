//! Adaptive Gauss-Kronrod (7/15) quadrature.

use crate::error::{Error, Result};

const XGK: [f64; 8] = [
    0.991_455_371_120_812_6,
    0.949_107_912_342_758_5,
    0.864_864_423_359_769_1,
    0.741_531_185_599_394_5,
    0.586_087_235_467_691_1,
    0.405_845_151_377_397_2,
    0.207_784_955_007_898_48,
    0.0,
];
const WGK: [f64; 8] = [
    0.022_935_322_010_529_224,
    0.063_092_092_629_978_56,
    0.104_790_010_322_250_19,
    0.140_653_259_715_525_92,
    0.169_004_726_639_267_9,
    0.190_350_578_064_785_42,
    0.204_432_940_075_298_89,
    0.209_482_141_084_727_82,
];
const WG: [f64; 4] = [
    0.129_484_966_168_869_7,
    0.279_705_391_489_276_64,
    0.381_830_050_505_118_9,
    0.417_959_183_673_469_4,
];

fn gk15<F: FnMut(f64) -> f64>(f: &mut F, a: f64, b: f64) -> (f64, f64) {
    let c = 0.5 * (a + b);
    let h = 0.5 * (b - a);
    let fc = f(c);
    let mut k = fc * WGK[7];
    let mut g = fc * WG[3];
    for j in 0..7 {
        let x = h * XGK[j];
        let s = f(c - x) + f(c + x);
        k += WGK[j] * s;
        if j % 2 == 1 {
            g += WG[j / 2] * s;
        }
    }
    (k * h, ((k - g) * h).abs())
}

/// `int_a^b f` to absolute tolerance `abs_tol` or relative tolerance `rel_tol`.
pub fn integrate<F: FnMut(f64) -> f64>(mut f: F, a: f64, b: f64, abs_tol: f64, rel_tol: f64) -> Result<f64> {
    let (rough, _) = gk15(&mut f, a, b);
    let tol = abs_tol.max(rel_tol * rough.abs());
    let mut stack = vec![(a, b, 0u32)];
    let (mut total, mut err_total) = (0.0f64, 0.0);
    let mut panels = Vec::new();
    while let Some((lo, hi, depth)) = stack.pop() {
        let (v, e) = gk15(&mut f, lo, hi);
        let width = (hi - lo) / (b - a);
        if e <= (tol * width).max(1e-15 * v.abs()) || e < 1e-300 {
            panels.push((lo, v));
            err_total += e;
            total += v;
            continue;
        }
        if depth >= 40 {
            return Err(Error::Convergence(format!("panel [{lo}, {hi}] did not converge")));
        }
        let mid = 0.5 * (lo + hi);
        stack.push((mid, hi, depth + 1));
        stack.push((lo, mid, depth + 1));
    }
    if err_total > tol.max(rel_tol * total.abs()) * 10.0 {
        return Err(Error::Convergence(format!("estimated error {err_total:e} exceeds tolerance")));
    }
    // Sum panels left to right for a reproducible result.
    panels.sort_by(|x, y| x.0.total_cmp(&y.0));
    Ok(panels.iter().map(|p| p.1).sum())
}
