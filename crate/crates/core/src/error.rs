use alloc::string::String;

use crate::scalar::C64;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("index {index} out of range for dimension {bound}")]
    IndexOutOfRange { index: usize, bound: usize },

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("starting vector is zero")]
    ZeroStartVector,

    #[error("{function} is not defined at eigenvalue {point}")]
    DomainViolation { function: &'static str, point: C64 },

    #[error("eigenvector matrix too ill-conditioned (estimate {condition:e}) and no fallback for {function}")]
    IllConditioned { function: &'static str, condition: f64 },

    #[error("iteration for {0} did not converge")]
    NoConvergence(&'static str),

    #[error("matrix is not Hermitian")]
    NotHermitian,

    #[error("problem size {n} exceeds the dense guard {limit}")]
    SizeGuard { n: usize, limit: usize },

    #[error("point lies inside the spectral region")]
    InsideRegion,

    #[error("singular matrix")]
    Singular,
}

pub type Result<T> = core::result::Result<T, Error>;

pub(crate) fn invalid(msg: &str) -> Error {
    Error::InvalidArgument(String::from(msg))
}
