//! Reduction to the fundamental domain and the invariants u and mu.

use num_complex::Complex64;
use theta_moment::halfplane::{bergman_test_function, k_theta, mu, point_matrix, reduce_to_fundamental, u_invariant, Point, Weight};

fn main() -> theta_moment::Result<()> {
    for s in ["0.3+0.004i", "7.25+0.5i", "-0.45+0.9i"] {
        let z: Point = s.parse()?;
        let r = reduce_to_fundamental(&z);
        println!("{s:>12} -> {} via {:?}, height {:.6}", r.point, r.gamma, r.height);
    }

    let w = Weight::new(12)?;
    let g = point_matrix(&"0.2+1.7i".parse()?);
    println!("u(g) = {:.12}", u_invariant(&g)?);
    println!("mu(g) = {:.12}", mu(&g));
    println!("M_12(g) = {:.6e}", bergman_test_function(&g, w));
    let t = 0.4;
    let rotated = bergman_test_function(&(k_theta(t) * g), w) / bergman_test_function(&g, w);
    println!("M_12(k_t g) / M_12(g) = {rotated:.12}");
    println!("e^(12 i t)           = {:.12}", Complex64::from_polar(1.0, 12.0 * t));
    Ok(())
}
