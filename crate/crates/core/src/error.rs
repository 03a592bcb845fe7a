use thiserror::Error;

/// Library-wide error type.
#[derive(Debug, Error)]
pub enum Error {
    /// A function evaluated to NaN or infinity at a sampled point.
    #[error("non-finite value at {context}: point {point:?}")]
    NonFinite { context: &'static str, point: Vec<f64> },

    /// A quadrature did not converge within its refinement budget.
    /// Carries the last two iterates so the caller can inspect the gap.
    #[error("{op}: quadrature did not converge (last {last:.6e}, previous {previous:.6e})")]
    Convergence { op: &'static str, last: f64, previous: f64 },

    /// Input outside the supported envelope of an operation.
    #[error("domain error: {0}")]
    Domain(String),

    /// Evaluation at a pole of a special function.
    #[error("pole of {0} at {1}")]
    Pole(&'static str, f64),

    /// Model data violates a structural precondition.
    #[error("invalid model: {0}")]
    InvalidModel(String),
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    pub(crate) fn domain(msg: impl Into<String>) -> Self {
        Error::Domain(msg.into())
    }
}
