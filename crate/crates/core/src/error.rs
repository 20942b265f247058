use thiserror::Error;

/// Errors raised by the numerical kernels and the table drivers.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum SieveError {
    #[error("argument {value} outside the domain of {what} (requires {requires})")]
    Domain {
        what: &'static str,
        value: f64,
        requires: &'static str,
    },

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("table mismatch: {0}")]
    Mismatch(String),

    #[error("quadrature did not converge on [{a}, {b}] within {panels} panels (error estimate {estimate:e})")]
    NonConvergence {
        a: f64,
        b: f64,
        panels: usize,
        estimate: f64,
    },

    #[error("tau recursion diverges: ratio limit {ratio_limit} >= 1 for eps = {eps}")]
    Divergent { eps: String, ratio_limit: f64 },

    #[error("geometric tail invalid: {0}")]
    TailInvalid(String),

    #[error("internal consistency check failed: {0}")]
    Internal(String),
}

pub type Result<T> = std::result::Result<T, SieveError>;

pub(crate) fn domain(what: &'static str, value: f64, requires: &'static str) -> SieveError {
    SieveError::Domain {
        what,
        value,
        requires,
    }
}
