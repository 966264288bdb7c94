pub mod bergman;
pub mod cli;
pub mod error;
pub mod halfplane;
pub mod lattice;
pub mod quad;
pub mod quaternion;
pub mod weil;

pub use error::{Error, Result};
