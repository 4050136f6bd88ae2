use thiserror::Error;

/// Failure modes shared by every check in the crate.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    /// An argument lies outside the domain where the operation is defined.
    #[error("domain error: {0}")]
    Domain(String),

    /// The quadrature or truncation error estimate exceeds the requested tolerance.
    #[error("accuracy error: estimated error {estimate:e} exceeds tolerance {tolerance:e} ({context})")]
    Accuracy {
        estimate: f64,
        tolerance: f64,
        context: String,
    },

    /// A root finder or iterative method produced an unusable answer.
    #[error("numerical failure: {0}")]
    NumericalFailure(String),

    /// A root landed so close to the unit circle that inside/outside cannot be decided.
    #[error("boundary ambiguity: root {re}{im:+}i has modulus within {tol:e} of 1")]
    BoundaryAmbiguity { re: f64, im: f64, tol: f64 },

    /// The operation requires a different symbol or report variant.
    #[error("type error: {0}")]
    Type(String),

    /// An integrand returned NaN or infinity at a quadrature node.
    #[error("non-finite integrand value at node {node}")]
    NonFinite { node: String },

    /// Two independent estimators of the same quantity disagree.
    #[error("consistency error: {0}")]
    Consistency(String),

    /// Every grid point was excluded, so no bound can be formed.
    #[error("undefined bound: {0}")]
    UndefinedBound(String),

    #[error("unsupported: {0}")]
    Unsupported(String),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn domain(msg: impl Into<String>) -> Error {
    Error::Domain(msg.into())
}
