//! Orbits of the order indicator under the finite Weil representation, and the global catalog.

use theta_moment::weil::{global_orbit, local_orbit_report, norm_character_sum, FiniteModel};

fn main() -> theta_moment::Result<()> {
    let models = [
        FiniteModel::eichler(2, 1)?,
        FiniteModel::eichler(2, 2)?,
        FiniteModel::eichler(3, 1)?,
        FiniteModel::eichler(5, 1)?,
        FiniteModel::ramified(2)?,
        FiniteModel::ramified(3)?,
        FiniteModel::ramified(5)?,
    ];
    for m in &models {
        let r = local_orbit_report(m)?;
        println!("{m}: carrier {}, orbit {}, index {}, matches {}", r.carrier, r.orbit_size, r.index, r.matches_prediction);
    }
    for p in [3, 5, 7] {
        println!("norm character sum p = {p}: {:?}", norm_character_sum(p, 1)?.as_rational());
    }
    let c = global_orbit(12, 5)?;
    println!("catalog q = 12, D_B = 5: {} functions in {} families", c.total(), c.entries.len());
    for e in &c.entries {
        println!("  a = {} ({} x {}): {} x {}", e.a, e.a1, e.a2, e.multiplicity, e.coefficient);
    }
    Ok(())
}
