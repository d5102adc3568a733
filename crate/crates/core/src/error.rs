use thiserror::Error;

/// Errors raised by the numerical layers.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("matrix exponential overflow: norm {norm:.3e} exceeds cap {cap:.3e}")]
    ExpOverflow { norm: f64, cap: f64 },

    #[error("not PSD: {0}")]
    NotPsd(String),

    #[error("matrix singular to working precision (condition estimate {cond:.3e})")]
    Singular { cond: f64 },

    #[error("eigen solver did not converge: {0}")]
    NoConvergence(String),

    #[error("not a contraction: norm {norm:.17} exceeds 1")]
    NotContraction { norm: f64 },

    #[error("generator not dissipative: hermitian part has eigenvalue {max_eig:.3e}")]
    NotDissipative { max_eig: f64 },

    #[error("co-generator has eigenvalue 1")]
    CogeneratorEigenvalueOne,

    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("index {index} out of range for family of size {len}")]
    IndexOutOfRange { index: usize, len: usize },

    #[error("internal consistency check failed: {what} (residual {residual:.3e})")]
    Inconsistent { what: &'static str, residual: f64 },

    #[error("quadrature budget exhausted: achieved residual {achieved:.3e}, target {target:.3e}")]
    QuadratureBudget { achieved: f64, target: f64 },

    #[error("invalid argument: {0}")]
    InvalidArgument(String),
}

pub type Result<T> = std::result::Result<T, Error>;
