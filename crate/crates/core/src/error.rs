//! Error type shared by all modules.

use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    /// An argument fell outside the documented domain of an operation.
    #[error("domain error: {0}")]
    Domain(String),

    /// Neither evaluation regime reached the requested accuracy.
    #[error("convergence failure in {context}: achieved {achieved:.3e}, requested {requested:.3e}")]
    Convergence {
        context: &'static str,
        achieved: f64,
        requested: f64,
    },

    /// Adaptive quadrature stopped refining before meeting its error budget.
    #[error("quadrature failure in {context}: achieved error {achieved:.3e}, budget {budget:.3e}")]
    Quadrature {
        context: &'static str,
        achieved: f64,
        budget: f64,
    },

    /// An order measure violated one of its validity conditions.
    #[error("invalid order measure: {0}")]
    Measure(String),

    /// A truncated series could not certify the requested tolerance.
    #[error("truncation bound {bound:.3e} exceeds tolerance {tol:.3e}")]
    Truncation { bound: f64, tol: f64 },

    /// A simulation loop exceeded its configured step budget.
    #[error("step budget exhausted: {0}")]
    Budget(String),
}

pub type Result<T> = std::result::Result<T, Error>;
