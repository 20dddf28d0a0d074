use thiserror::Error;

/// Errors produced by the numerical routines of this crate.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    /// An argument lies outside the domain of the operation.
    #[error("domain error: {0}")]
    Domain(String),

    /// A quadrature could not reach the requested tolerance.
    #[error("accuracy error: estimated error {estimate:.3e} exceeds tolerance {tolerance:.3e}")]
    Accuracy { estimate: f64, tolerance: f64 },

    /// Exponential growth of a mode would overflow the floating-point range.
    #[error("mode growth saturated: exponent {exponent:.3} exceeds the cap {limit}")]
    Saturation { exponent: f64, limit: f64 },

    /// Two independent evaluation routes disagree.
    #[error("consistency error: {0}")]
    Consistency(String),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn domain<T>(msg: impl Into<String>) -> Result<T> {
    Err(Error::Domain(msg.into()))
}
