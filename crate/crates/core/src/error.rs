use thiserror::Error;

/// Error categories shared by every module.
///
/// The category is the contract: callers (notably the CLI) map `Domain` to a
/// configuration failure, `Convergence` to an iteration that did not settle,
/// and `Numerical` to a breakdown during otherwise valid computation.
#[derive(Debug, Error)]
pub enum CoreError {
    /// Input violates a precondition (non-positive length, reflectivity >= 1, ...).
    #[error("domain error: {0}")]
    Domain(String),

    /// An iterative solve ran out of iterations; message carries the last iterates.
    #[error("convergence failure: {0}")]
    Convergence(String),

    /// Overflow, NaN, vanishing denominator, or a feature the data does not contain.
    #[error("numerical error: {0}")]
    Numerical(String),
}

impl CoreError {
    pub fn domain(msg: impl Into<String>) -> Self {
        CoreError::Domain(msg.into())
    }

    pub fn convergence(msg: impl Into<String>) -> Self {
        CoreError::Convergence(msg.into())
    }

    pub fn numerical(msg: impl Into<String>) -> Self {
        CoreError::Numerical(msg.into())
    }
}

pub type Result<T> = std::result::Result<T, CoreError>;
