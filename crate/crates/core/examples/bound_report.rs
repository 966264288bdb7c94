//! Spectral lower bound against the geometric upper bound for the weight-m eigenform.

use theta_moment::bergman::{geometric_bound_pipeline, spectral_lower_bound, Convention};
use theta_moment::halfplane::Point;
use theta_moment::lattice::OrderSpec;

fn main() -> theta_moment::Result<()> {
    let z = Point::i();
    for m in [12, 16] {
        let s = spectral_lower_bound(&z, m, Convention::Probability)?;
        let g = geometric_bound_pipeline(&z, m, OrderSpec::Full, 20)?;
        println!(
            "m = {m}: spectral {:.6e}, geometric {:.6e}, ratio {:.3} (horizon {}, {} elements)",
            s.value,
            g.value,
            g.value / s.value,
            g.horizon,
            g.elements
        );
    }
    Ok(())
}
