use thiserror::Error;

/// Errors produced by the density evaluators and profile analysis.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    /// Argument outside the mathematical domain of an operation.
    #[error("domain error: {0}")]
    Domain(String),

    /// Model or configuration parameter violates its invariant.
    #[error("invalid parameter `{name}`: {reason}")]
    Parameter { name: &'static str, reason: String },

    /// A series or table would exceed its configured size cap.
    #[error("resource limit: {0}")]
    Resource(String),

    /// Grid layout incompatible with the requested operation.
    #[error("grid error: {0}")]
    Grid(String),

    /// Not enough features (extrema, samples) to compute a statistic.
    #[error("insufficient data: {0}")]
    InsufficientData(String),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn param(name: &'static str, reason: impl Into<String>) -> Error {
    Error::Parameter {
        name,
        reason: reason.into(),
    }
}
