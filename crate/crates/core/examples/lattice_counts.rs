//! Counts M(g, n; delta) of integral matrices of determinant n near the rotations.

use theta_moment::halfplane::{Frame, Point};
use theta_moment::lattice::{count_norm_ball, count_profile, fitted_exponent, second_moment, CountQuery, OrderSpec, Weighting};

fn main() -> theta_moment::Result<()> {
    let frame = Frame::from_point(&Point::i());
    for (n, delta) in [(1, 0.0), (2, 0.0), (1, 0.25), (5, 0.1)] {
        let c = count_norm_ball(&CountQuery { order: OrderSpec::Full, frame: frame.clone(), n, delta })?;
        println!("M(i, {n}; {delta}) = {c}");
    }

    let z: Point = "0.3+0.8i".parse()?;
    for order in [OrderSpec::Full, OrderSpec::eichler(6)?] {
        let p = count_profile(order, &Frame::from_point(&z), 30, 0.1)?;
        println!("{order} at {z}, delta 0.1: {:?}", p.counts);
    }

    let mut pts = Vec::new();
    for big_n in [100u64, 200, 400] {
        let p = count_profile(OrderSpec::Full, &frame, big_n, 1.0 / big_n as f64)?;
        let s = second_moment(&p, Weighting::Uniform);
        println!("N = {big_n}: sum of squares {s}");
        pts.push((big_n as f64, s));
    }
    println!("fitted exponent {:.4}", fitted_exponent(&pts));
    Ok(())
}
