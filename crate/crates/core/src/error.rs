use thiserror::Error;

/// Errors raised across the crate.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    /// Argument outside the mathematical domain of the function.
    #[error("domain error in {func}: {msg}")]
    Domain { func: &'static str, msg: String },

    /// Parameter record violates its invariants.
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    /// The result is finite mathematically but not representable as an f64.
    #[error("range error in {func}: {msg}")]
    Range { func: &'static str, msg: String },

    /// A point value diverges (e.g. a density at the origin).
    #[error("singular value in {func}: {msg}")]
    Singular { func: &'static str, msg: String },

    /// An equation or operator precondition is not met.
    #[error("precondition failed: {0}")]
    Precondition(String),

    /// Quadrature or root finding did not reach the requested tolerance.
    #[error("no convergence in {context}: estimate {estimate:e}, error estimate {error:e}")]
    Convergence {
        context: &'static str,
        estimate: f64,
        error: f64,
    },

    /// An operator's decay/integrability declaration was violated.
    #[error("integrability error: {0}")]
    Integrability(String),

    /// Sample data unsuitable for a statistic.
    #[error("data error: {0}")]
    Data(String),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn domain(func: &'static str, msg: impl Into<String>) -> Error {
    Error::Domain {
        func,
        msg: msg.into(),
    }
}
