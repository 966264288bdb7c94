//! Exact finite models of the local Weil representation and the orbit of the
//! characteristic function of a local order.

mod catalog;
mod cyclo;
mod model;
mod orbit;

pub use catalog::{factorize, global_orbit, local_multiplicity, CatalogEntry, OrbitCatalog};
pub use cyclo::Cyclo;
pub use model::{
    weil_diag, weil_fourier, weil_fourier_dense, weil_lower_unipotent, weil_negate, weil_unipotent, FiniteModel,
    FiniteWeilFunction, Geometry, MAX_CARRIER,
};
pub use orbit::{
    fixed_by_u0, jmap, local_index, local_orbit_report, norm_character_sum, nu, orbit_closure, predicted_orbit,
    predicted_orbit_labeled, LocalOrbitReport, OrbitGolden, OrbitLabel,
};
