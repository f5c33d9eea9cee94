use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("size mismatch: {left} vs {right}")]
    SizeMismatch { left: usize, right: usize },

    #[error("{what}: n = {n} exceeds the limit of {max}")]
    TooLarge {
        what: &'static str,
        n: usize,
        max: usize,
    },

    #[error("singular gradient: edge {edge} has zero length and p = {p} < 2")]
    SingularEdge { edge: usize, p: f64 },

    #[error("input is not 2-opt stable ({violations} improving moves)")]
    NotTwoOptStable { violations: usize },

    #[error("parse error at line {line}: {msg}")]
    Parse { line: usize, msg: String },

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

pub(crate) fn invalid(msg: impl Into<String>) -> Error {
    Error::InvalidInput(msg.into())
}
