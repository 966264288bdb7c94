use thiserror::Error;

/// Failure modes shared by every module.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("domain error: {0}")]
    Domain(String),
    #[error("unsupported: {0}")]
    Unsupported(String),
    #[error("overflow: {0}")]
    Overflow(String),
    #[error("insufficient coefficients: need at least {needed}, have {have}")]
    InsufficientCoefficients { needed: usize, have: usize },
    #[error("quadrature did not converge: {0}")]
    Convergence(String),
    #[error("{0}")]
    Computation(String),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn domain<T>(msg: impl Into<String>) -> Result<T> {
    Err(Error::Domain(msg.into()))
}
