use thiserror::Error;

/// Errors raised by the numerical core.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    /// An argument lies outside the domain of the operation.
    #[error("domain error: {0}")]
    Domain(String),
    /// A configuration value is invalid or inconsistent.
    #[error("config error: {0}")]
    Config(String),
    /// Shapes of two operands do not agree.
    #[error("shape mismatch: {0}")]
    Shape(String),
    /// Monte Carlo refused to run because the expected hit count is too small.
    #[error("expected {expected:.3} hits below threshold {threshold}; use exact method")]
    RareEvent { expected: f64, threshold: f64 },
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn domain(msg: impl Into<String>) -> Error {
    Error::Domain(msg.into())
}

pub(crate) fn config(msg: impl Into<String>) -> Error {
    Error::Config(msg.into())
}
