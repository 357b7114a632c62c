use thiserror::Error;

/// Errors produced by the rotation, bound, and solver routines.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("matrix is not orthonormal: max |MᵀM - I| = {deviation:e}")]
    NotOrthonormal { deviation: f64 },

    #[error("matrix determinant {det} is not 1")]
    BadDeterminant { det: f64 },

    #[error("matrix has non-finite entries")]
    NonFinite,

    #[error("axis-angle vector has norm {norm}, outside the closed ball of radius pi")]
    OutsideBall { norm: f64 },

    #[error("expected a unit vector, got norm {norm}")]
    NotUnit { norm: f64 },

    #[error("angle {value} is outside [0, pi]")]
    AngleOutOfRange { value: f64 },

    #[error("{name} = {value} is outside its domain {domain}")]
    OutOfDomain {
        name: &'static str,
        value: f64,
        domain: &'static str,
    },

    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },

    #[error("residual evaluation failed: {0}")]
    Residual(String),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),
}

pub type Result<T> = std::result::Result<T, Error>;
