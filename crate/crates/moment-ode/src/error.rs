use model_core::ModelError;
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum MomentError {
    #[error(transparent)]
    Model(#[from] ModelError),
    #[error("step halving moved {quantity} by {change:.3e} (tolerance {tol:.1e})")]
    Resolution {
        quantity: String,
        change: f64,
        tol: f64,
    },
    #[error("order {0} is outside the supported range")]
    Order(usize),
}

pub type Result<T> = std::result::Result<T, MomentError>;
