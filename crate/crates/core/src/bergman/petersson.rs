//! Petersson norms over the standard fundamental domain.

use serde::{Deserialize, Serialize};

use super::qexp::{eval_cusp_form, required_terms, QExpansion};
use crate::error::{Error, Result};
use crate::halfplane::Point;
use crate::quad::integrate;

/// Normalization of the invariant measure.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Convention {
    /// `dx dy / y^2`.
    Hyperbolic,
    /// `dx dy / y^2` divided by the covolume `pi / 3`.
    Probability,
}

impl Convention {
    pub const ALL: [Convention; 2] = [Convention::Hyperbolic, Convention::Probability];

    pub fn name(self) -> &'static str {
        match self {
            Convention::Hyperbolic => "hyperbolic",
            Convention::Probability => "probability",
        }
    }

    /// Factor converting a hyperbolic-measure integral into this convention.
    pub fn factor(self) -> f64 {
        match self {
            Convention::Hyperbolic => 1.0,
            Convention::Probability => 3.0 / std::f64::consts::PI,
        }
    }
}

/// Height above which `y^(m-2) e^(-4 pi y)` is negligible relative to its peak.
fn cutoff(m: u32) -> f64 {
    let k = (m as f64 - 2.0).max(0.0);
    let peak = (k / (4.0 * std::f64::consts::PI)).max(1.0);
    let log_peak = k * peak.ln() - 4.0 * std::f64::consts::PI * peak;
    let mut y = peak;
    while k * y.ln() - 4.0 * std::f64::consts::PI * y > log_peak - 60.0 {
        y += 0.25;
    }
    y
}

/// `int_F y^m |f|^2 dx dy / y^2`, rescaled per `convention`.
pub fn petersson_norm(f: &QExpansion, convention: Convention) -> Result<f64> {
    let m = f.weight.get();
    let y0 = 3f64.sqrt() / 2.0;
    let needed = required_terms(m, y0)?;
    if f.len() < needed {
        return Err(Error::InsufficientCoefficients { needed, have: f.len() });
    }
    let top = cutoff(m);
    let mut failure = None;
    let mut inner = |x: f64| -> f64 {
        let lo = (1.0 - x * x).sqrt();
        let r = integrate(
            |y| {
                let v = eval_cusp_form(f, &Point::new(x, y).expect("y > 0")).expect("enough terms");
                y.powi(m as i32 - 2) * v.norm_sqr()
            },
            lo,
            top,
            0.0,
            1e-13,
        );
        match r {
            Ok(v) => v,
            Err(e) => {
                failure.get_or_insert(e);
                0.0
            }
        }
    };
    let total = integrate(&mut inner, -0.5, 0.0, 0.0, 1e-12)?;
    let total = total + integrate(&mut inner, 0.0, 0.5, 0.0, 1e-12)?;
    if let Some(e) = failure {
        return Err(e);
    }
    Ok(total * convention.factor())
}
