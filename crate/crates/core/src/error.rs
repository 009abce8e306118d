use thiserror::Error;

/// Errors raised by parsing and by operations whose preconditions fail.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("parse error: {0}")]
    Parse(String),
    #[error("empty input")]
    EmptyInput,
    #[error("zero or negative arity in `{0}`")]
    BadArity(String),
    #[error("duplicate symbol name `{0}`")]
    DuplicateName(String),
    #[error("unknown symbol `{0}`")]
    UnknownSymbol(String),
    #[error("symbol `{name}` expects {expected} arguments, got {got}")]
    WrongChildCount {
        name: String,
        expected: usize,
        got: usize,
    },
    #[error("function variable `{name}` used with arities {first} and {second}")]
    InconsistentArity {
        name: String,
        first: usize,
        second: usize,
    },
    #[error("no assignment for variable x{0}")]
    MissingAssignment(u32),
    #[error("no image for function variable `{0}`")]
    MissingImage(String),
    #[error("image for `{name}` mentions x{var} but the arity is {arity}")]
    ImageArity {
        name: String,
        var: u32,
        arity: usize,
    },
    #[error("invalid position {0:?}")]
    InvalidPosition(Vec<usize>),
    #[error("invalid parameter: {0}")]
    BadParam(String),
    #[error("report is not stable")]
    NotStable,
}

pub type Result<T> = std::result::Result<T, Error>;
