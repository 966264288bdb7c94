//! Hecke eigenvalues of Delta recovered from lattice kernel sums alone.

use theta_moment::bergman::{hecke_ratio, kernel_sum, KernelSumParams};
use theta_moment::halfplane::Point;
use theta_moment::lattice::OrderSpec;

fn main() -> theta_moment::Result<()> {
    let params = KernelSumParams::new(12, 1e-12)?;
    let z: Point = "0.1+1.2i".parse()?;
    let w: Point = "-0.3+0.9i".parse()?;
    println!("S(1; z, w) = {:.12e}", kernel_sum(1, &z, &w, &params, OrderSpec::Full)?);
    for n in 2..=9 {
        let k = hecke_ratio(n, &z, &w, &params)?;
        println!("n = {n}: tau(n) = kappa * n^5 = {:.8}", k.re * (n as f64).powi(5));
    }
    Ok(())
}
