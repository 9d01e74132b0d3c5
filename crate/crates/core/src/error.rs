use thiserror::Error;

/// Errors raised by the library.
///
/// Validation failures (`Domain`, `InvalidData`) are separated from numerical
/// failures so front ends can report them differently.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("domain error: {0}")]
    Domain(String),

    #[error("invalid data: {0}")]
    InvalidData(String),

    #[error("matrix is not positive definite: {0}")]
    NotPositiveDefinite(String),

    #[error("whitened covariance has eigenvalue {value:e} below tolerance (largest {largest:e})")]
    NegativeEigenvalue { value: f64, largest: f64 },

    #[error("eigendecomposition failed: {0}")]
    Eigen(String),

    #[error(
        "quadrature did not converge on [{lower:e}, {upper:e}]: estimate {estimate:e}, \
         error {error:e} after {evaluations} evaluations"
    )]
    Quadrature {
        lower: f64,
        upper: f64,
        estimate: f64,
        error: f64,
        evaluations: usize,
    },

    #[error("insufficient information for sample splitting: I_1 = {information:.6} < {required}")]
    InsufficientInformation { information: f64, required: f64 },
}

impl Error {
    /// True for errors caused by invalid input rather than numerical breakdown.
    pub fn is_validation(&self) -> bool {
        matches!(self, Error::Domain(_) | Error::InvalidData(_))
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

pub(crate) fn domain<T>(msg: impl Into<String>) -> Result<T> {
    Err(Error::Domain(msg.into()))
}
