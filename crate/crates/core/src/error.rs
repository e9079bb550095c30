use thiserror::Error;

/// Errors raised by the algebra, model and analysis layers.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("division by the zero rational function")]
    DivisionByZero,

    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),

    #[error("matrix is singular as a rational matrix")]
    SingularMatrix,

    #[error("matrix does not have full column rank")]
    RankDeficient,

    #[error("evaluation point is a pole of some entry")]
    PoleAtPoint,

    #[error("entry degree {degree} exceeds the ceiling {ceiling}")]
    DegreeOverflow { degree: usize, ceiling: usize },

    #[error("invalid transformation: {0}")]
    InvalidTransformation(String),

    #[error("invalid partition: {0}")]
    InvalidPartition(String),

    #[error("self-loop of node {node} equals one identically; it cannot be normalised away")]
    SelfLoopSingular { node: usize },

    #[error("no feasible node selection exists")]
    NoFeasibleSelection,

    #[error("invalid model: {0}")]
    InvalidModel(String),

    #[error("parse error: {0}")]
    Parse(String),
}

pub type Result<T> = std::result::Result<T, Error>;
