//! The elementary theta series of Delta at a point factors as Delta(z) Delta(tau).

use theta_moment::bergman::{elementary_theta_coeffs, eval_level_one, theta_coefficient, KernelSumParams, QExpansion};
use theta_moment::halfplane::Point;
use theta_moment::lattice::OrderSpec;

fn main() -> theta_moment::Result<()> {
    let f = QExpansion::delta(60);
    let z: Point = "0.2+0.9i".parse()?;
    let d = eval_level_one(&f, &z)?;
    let c = elementary_theta_coeffs(&f, &z, 8)?;
    for (n, v) in c.iter().enumerate() {
        println!("n = {}: coefficient / Delta(z) = {:.6}", n + 1, v / d);
    }

    let params = KernelSumParams::new(12, 1e-12)?;
    let w: Point = "i".parse()?;
    let first = theta_coefficient(1, &z, &w, &params, OrderSpec::Full)?;
    for n in 1..=4 {
        let v = theta_coefficient(n, &z, &w, &params, OrderSpec::Full)?;
        println!("kernel theta n = {n}: ratio to n = 1 is {:.6}", v / first);
    }
    Ok(())
}
