use thiserror::Error;

/// Errors raised by instance validation and the coding/evaluation routines.
#[derive(Debug, Error)]
pub enum LossyError {
    /// The input violates the instance schema or a type invariant.
    #[error("invalid instance: {0}")]
    Schema(String),

    /// No code can meet the excess-distortion budget: `Pr{min_y d(X,y) > D}` exceeds epsilon.
    #[error("infeasible instance: Pr{{min_y d(X,y) > D}} = {uncoverable} exceeds epsilon = {epsilon}")]
    Infeasible { uncoverable: f64, epsilon: f64 },

    /// A product alphabet would exceed the configured enumeration budget.
    #[error("alphabet budget exceeded: {size} symbols needed, budget is {budget}")]
    Budget { size: u128, budget: usize },

    /// Arguments of mismatched dimension (code vs instance, law lengths, ...).
    #[error("dimension mismatch: {0}")]
    Dimension(String),

    /// A parameter outside its admissible domain.
    #[error("argument out of domain: {0}")]
    Domain(String),

    /// An iterative solver did not reach its stopping tolerance.
    #[error("no convergence: {0}")]
    NoConvergence(String),

    #[error(transparent)]
    Json(#[from] serde_json::Error),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = core::result::Result<T, LossyError>;
