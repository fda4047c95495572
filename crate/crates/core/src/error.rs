use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid input: {0}")]
    Invalid(String),

    #[error("dimension mismatch: expected {expected}, got {actual}")]
    DimensionMismatch { expected: usize, actual: usize },

    #[error("matrix is not semisimple (condition {condition:.3e}, residual {residual:.3e})")]
    NotSemisimple { condition: f64, residual: f64 },

    #[error("matrix is numerically singular (smallest singular value {sigma_min:.3e})")]
    Singular { sigma_min: f64 },

    #[error("frame is degenerate (condition number {condition:.3e})")]
    Degenerate { condition: f64 },

    #[error("coincident points at positions {0} and {1}")]
    CoincidentPoints(usize, usize),

    #[error("function undefined at {0}")]
    Undefined(String),

    #[error("point ({re}, {im}) is off the unit circle")]
    OffCircle { re: f64, im: f64 },

    #[error("sampler failed: {0}")]
    Sampler(String),

    #[error("node budget exceeded: {nodes} nodes > budget {budget}")]
    BudgetExceeded { nodes: u128, budget: u64 },

    #[error("inconsistent symmetric-group action: {0} (try a smaller epsilon or more points)")]
    ModelResolution(String),

    #[error("graph too large for exact cycle search: {0} vertices")]
    GraphTooLarge(usize),

    #[error("iteration did not converge: {0}")]
    NoConvergence(&'static str),
}

impl Error {
    pub(crate) fn invalid(msg: impl Into<String>) -> Self {
        Error::Invalid(msg.into())
    }
}
