use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("shape mismatch: {0}")]
    Shape(String),

    #[error("inadmissible family parameters: {0}")]
    Inadmissible(String),

    #[error("degenerate automorphism parameters: {0}")]
    Degenerate(String),

    #[error("operator not nilpotent")]
    NotNilpotent,

    #[error("unsupported: {0}")]
    Unsupported(String),

    #[error("parse error: {0}")]
    Parse(String),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
