//! Spectral oracles, kernel sums over lattices, elementary theta series and
//! the fourth-moment bound evaluators.

pub mod bounds;
pub mod kernel;
pub mod petersson;
pub mod qexp;
pub mod theta;

pub use bounds::{geometric_bound_pipeline, geometric_upper_bound, spectral_lower_bound, BoundProfile, GeometricBound, SpectralBound};
pub use kernel::{hecke_ratio, kernel_sum, theta_coefficient, KernelSumParams};
pub use petersson::{petersson_norm, Convention};
pub use qexp::{delta_coefficients, eval_cusp_form, eval_level_one, QExpansion, DIM_ONE_WEIGHTS};
pub use theta::{elementary_theta_coeffs, theta_horocycle_l2};
