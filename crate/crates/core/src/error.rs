use thiserror::Error;

use crate::dsl::Diagnostic;
use crate::grid::GridDims;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("malformed element id `{0}`")]
pub struct ParseElementError(pub String);

/// Failures while evaluating an expression against a board.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum EvalError {
    #[error("type error: {0}")]
    Type(String),
    #[error("element {0} lies in more than one instance of {1}")]
    Ambiguous(String, String),
    #[error("integer overflow")]
    Overflow,
    #[error("no value for {0}")]
    Missing(String),
}

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid grid size {m}x{n}: both sides must be at least 1")]
    InvalidDims { m: u32, n: u32 },
    #[error("bad size `{0}`, expected MxN")]
    BadSize(String),
    #[error("{what} budget exhausted after {reached}")]
    Budget { what: &'static str, reached: u64 },
    #[error("{0}")]
    Rule(Diagnostic),
    #[error("size requirements are not met at {0}")]
    Requirements(GridDims),
    #[error("unknown family `{0}`")]
    UnknownFamily(String),
    #[error(transparent)]
    Eval(#[from] EvalError),
    #[error(transparent)]
    Element(#[from] ParseElementError),
    #[error("malformed document: {0}")]
    Document(String),
    #[error("family {family} cannot present value {value}: hidden set has neither the value nor undecided")]
    Unmaskable { family: String, value: String },
    #[error("presentation is not unique before thinning ({count} completions found)")]
    NotUnique { count: u64 },
    #[error("presented value at {0} is not allowed by the hidden set")]
    NotPresentable(String),
    #[error("unknown puzzle `{0}`")]
    UnknownPuzzle(String),
    #[error("unsupported: {0}")]
    Unsupported(String),
}

impl From<serde_json::Error> for Error {
    fn from(e: serde_json::Error) -> Self {
        Error::Document(e.to_string())
    }
}
