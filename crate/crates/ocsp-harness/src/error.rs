use thiserror::Error;

#[derive(Debug, Error)]
pub enum HarnessError {
    #[error("epsilon {0} must lie strictly between 0 and 1")]
    InvalidEpsilon(String),

    #[error("configuration error: {0}")]
    Config(String),

    #[error(transparent)]
    Core(#[from] ocsp_core::Error),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, HarnessError>;
