use model_core::ModelError;
use moment_ode::MomentError;
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum FluctuationError {
    #[error(transparent)]
    Model(#[from] ModelError),
    #[error(transparent)]
    Moment(#[from] MomentError),
    #[error("xi = {xi:e} at t = {t} is negative")]
    NegativeXi { t: f64, xi: f64 },
    #[error("xi = {xi} at t = {t} is not below one")]
    XiAtOne { t: f64, xi: f64 },
    #[error("the Jensen bound is undefined for xi = {0}")]
    UndefinedBound(f64),
    #[error("ensemble starts at p_e = {mean_excited}, equilibrium is {equilibrium}")]
    NotEquilibrium { mean_excited: f64, equilibrium: f64 },
    #[error("{0}")]
    Precondition(String),
}

pub type Result<T> = std::result::Result<T, FluctuationError>;
