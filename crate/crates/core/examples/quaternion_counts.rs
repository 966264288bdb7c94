//! Counts in a division order built from Q(sqrt(-19)), with and without a Cartan twist.

use theta_moment::quaternion::{count_quat, division_bound_rhs, quat_profile, CartanParams, DivisionOrderModel};

fn main() -> theta_moment::Result<()> {
    let model = DivisionOrderModel::standard();
    let id = CartanParams::identity();
    for (n, delta) in [(1, 0.0), (4, 0.0), (1, 6.0), (7, 1.0)] {
        println!("count(n = {n}, delta = {delta}) = {}", count_quat(&model, &id, n, delta)?);
    }
    println!("profile delta 0.5: {:?}", quat_profile(&model, &id, 20, 0.5)?);
    for lambda in [1.5, 3.0] {
        let c = CartanParams::new(lambda, 0.7)?;
        println!("lambda {lambda}: {:?}", quat_profile(&model, &c, 12, 2.0)?);
    }
    println!("bound at N = 100, delta = 0.01: {}", division_bound_rhs(100.0, 0.01, 1.0, -19, 0.0));
    Ok(())
}
