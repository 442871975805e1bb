use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("encoding error: {0}")]
    Encoding(String),
    #[error("unsupported graph or law: {0}")]
    Spec(String),
    #[error("invalid argument: {0}")]
    Argument(String),
    #[error("index out of range: {0}")]
    Range(String),
    #[error("parse error at byte {pos}: {msg}")]
    Parse { pos: usize, msg: String },
    #[error("resource guard: {0}")]
    Resource(String),
    #[error("underflow: {0}")]
    Underflow(String),
    #[error("unattainable: {0}")]
    Unattainable(String),
}

pub type Result<T> = std::result::Result<T, Error>;
