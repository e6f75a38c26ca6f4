use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("input error: {0}")]
    Input(String),
    #[error("no admissible path from letter {from} to letter {to}")]
    NoPath { from: usize, to: usize },
    #[error("bracket undefined: a0 = {a0} but b0 = {b0}")]
    BracketUndefined { a0: usize, b0: usize },
    #[error("inadmissible transition {from} -> {to} at {location}")]
    Inadmissible { from: usize, to: usize, location: String },
    #[error("surgery splice inadmissible at {junction}")]
    Surgery { junction: String },
    #[error("presentation error: {0}")]
    Presentation(String),
    #[error("pressure equation out of range: {0}")]
    OutOfRange(String),
    #[error("empty set: {0}")]
    EmptySet(String),
}

pub type Result<T> = std::result::Result<T, Error>;
