use thiserror::Error;

use crate::equilibrium::SolverFailure;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("degenerate body: {0}")]
    DegenerateBody(String),

    #[error("unsupported dimension {dim}: {what}")]
    UnsupportedDimension { dim: usize, what: &'static str },

    #[error("points {first} and {second} coincide")]
    DuplicatePoint { first: usize, second: usize },

    #[error("cloud of {n} points exceeds the dense storage limit of {max}")]
    TooLarge { n: usize, max: usize },

    #[error("solver failed: {0}")]
    Solver(Box<SolverFailure>),

    #[error("malformed body spec: {0}")]
    BodySpec(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl Error {
    pub(crate) fn invalid(msg: impl Into<String>) -> Self {
        Error::InvalidArgument(msg.into())
    }
}
