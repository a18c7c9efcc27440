use thiserror::Error;

/// Errors raised by the numerical routines.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),

    #[error("matrix is not Hermitian (defect {0:.3e})")]
    NotHermitian(f64),

    #[error("matrix is not positive semidefinite (eigenvalue {0:.3e})")]
    NotPositive(f64),

    #[error("invalid probability distribution: {0}")]
    InvalidDistribution(String),

    #[error("{what} = {value} is outside [{min}, {max}]")]
    OutOfRange {
        what: &'static str,
        value: f64,
        min: f64,
        max: f64,
    },

    #[error("cannot parse state file: {0}")]
    Parse(String),

    #[error("invalid density matrix: {0}")]
    InvalidState(String),

    #[error("coefficient {label} has imaginary part {imag:.3e}")]
    ComplexCoefficient { label: String, imag: f64 },

    #[error("invalid optimizer configuration: {0}")]
    InvalidConfig(String),

    #[error("gate error: {0}")]
    Gate(String),

    #[error("cannot vectorize the zero matrix")]
    ZeroMatrix,

    #[error("{path}: {message}")]
    Io { path: String, message: String },

    #[error("gradient descent diverged after {halvings} step-size halvings")]
    Diverged { halvings: usize },
}

pub type Result<T> = std::result::Result<T, Error>;
