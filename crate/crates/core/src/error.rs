use thiserror::Error;

/// Errors raised by the analysis and simulation routines.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    /// An argument lies outside the domain of the operation.
    #[error("domain error: {0}")]
    Domain(String),

    /// A mode or quadrature index does not exist in the state.
    #[error("mode index {index} out of range for a {n_modes}-mode state")]
    Index { index: usize, n_modes: usize },

    /// A covariance matrix violates the uncertainty principle. `eigenvalue`
    /// is the smallest symplectic eigenvalue, or the offending ordinary
    /// eigenvalue when the matrix is not even positive definite.
    #[error("unphysical covariance matrix (eigenvalue {eigenvalue} below the vacuum bound)")]
    Unphysical { eigenvalue: f64 },

    /// An enumeration would drop more probability mass than allowed.
    #[error("truncation {truncation} leaves tail mass {tail:e} above {limit:e}")]
    Truncation {
        truncation: u64,
        tail: f64,
        limit: f64,
    },
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn domain<T>(msg: impl Into<String>) -> Result<T> {
    Err(Error::Domain(msg.into()))
}
