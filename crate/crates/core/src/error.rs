use thiserror::Error;

/// Errors raised by the engine.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("division by zero")]
    DivisionByZero,
    #[error("pole at q = 1")]
    PoleAtOne,
    #[error("parse error: {0}")]
    Parse(String),
    #[error("invalid root datum: {0}")]
    InvalidRootDatum(String),
    #[error("weight height {height} exceeds the height cap {cap}")]
    HeightCap { height: usize, cap: usize },
    #[error("word {0:?} is not reduced")]
    NotReduced(Vec<usize>),
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
    #[error("unsupported: {0}")]
    Unsupported(String),
    #[error("internal consistency failure: {0}")]
    Internal(String),
}

pub type Result<T> = std::result::Result<T, Error>;
