use model_core::ModelError;

#[derive(Debug, thiserror::Error)]
pub enum OracleError {
    #[error(transparent)]
    Model(#[from] ModelError),
    #[error("{0} steps exceed the enumeration limit")]
    TooManySteps(usize),
    #[error("invalid discrete model: {0}")]
    Invalid(String),
}

pub type Result<T> = std::result::Result<T, OracleError>;
