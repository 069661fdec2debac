use model_core::ModelError;
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum McError {
    #[error(transparent)]
    Model(#[from] ModelError),
    #[error("jump probability {hazard:.3} per step at t = {t} exceeds 0.1; reduce dt")]
    StepTooLarge { t: f64, hazard: f64 },
    #[error("{0}")]
    Invalid(String),
}

pub type Result<T> = std::result::Result<T, McError>;
