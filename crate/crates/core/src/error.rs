use thiserror::Error;

/// Errors raised while building, solving or post-processing a relaxation.
#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("monomial {0} is not in the basis")]
    NotInBasis(String),

    #[error("line {line}: {msg}")]
    Parse { line: usize, msg: String },

    #[error("shape mismatch: {0}")]
    Shape(String),

    #[error("eigendecomposition failed: {0}")]
    Eigen(String),

    #[error("polynomial degree {0} is odd; an even degree is required")]
    OddDegree(u32),

    #[error("polynomial degree {0} is even; an odd degree is required")]
    EvenDegree(u32),

    #[error("the zero polynomial has no relaxation")]
    ZeroPolynomial,

    #[error("polynomial is not homogeneous")]
    NotHomogeneous,

    #[error("relaxation order {order} is too small: {reason}")]
    OrderTooSmall { order: u32, reason: String },

    #[error("monomial {0} of the objective is not covered by any clique")]
    Uncovered(String),

    #[error("invalid graph: {0}")]
    Graph(String),

    #[error("invalid input: {0}")]
    Invalid(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
