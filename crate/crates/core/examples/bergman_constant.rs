//! Compare the geometric kernel sum S(1; z, z) with the spectral side
//! (8 pi / (m - 1)) y^m |Delta(z)|^2 / <Delta, Delta> under both conventions.

use theta_moment::bergman::{eval_level_one, kernel_sum, petersson_norm, Convention, KernelSumParams, QExpansion};
use theta_moment::halfplane::Point;
use theta_moment::lattice::OrderSpec;

fn main() -> theta_moment::Result<()> {
    let m = 12;
    let delta = QExpansion::delta(80);
    let params = KernelSumParams::new(m, 1e-12)?;
    let points = ["i", "0.5+0.8660254037844386i", "0.1+1.2i", "-0.3+1.1i", "0.45+2i"];
    for conv in Convention::ALL {
        let norm = petersson_norm(&delta, conv)?;
        println!("{} convention, <Delta, Delta> = {norm:.12e}", conv.name());
        for s in points {
            let z: Point = s.parse()?;
            let s1 = kernel_sum(1, &z, &z, &params, OrderSpec::Full)?;
            let f = eval_level_one(&delta, &z)?;
            let spectral = 8.0 * std::f64::consts::PI / (m as f64 - 1.0) * z.y.powi(m as i32) * f.norm_sqr() / norm;
            println!("  z = {s:<26} S(1) = {:.12e}  ratio - 1 = {:+.3e}", s1.re, s1.re / spectral - 1.0);
        }
    }
    Ok(())
}
