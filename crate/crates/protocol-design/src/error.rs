use model_core::ModelError;

use crate::erasure::ErasureOutcome;

#[derive(Debug, thiserror::Error)]
pub enum DesignError {
    #[error(transparent)]
    Model(#[from] ModelError),
    #[error("erasure in tau = {tau} is infeasible: at least {min_tau} is needed (binding at node {node})")]
    Infeasible { tau: f64, min_tau: f64, node: usize },
    #[error("optimizer stopped after {} iterations without converging (best cost {})", .0.iterations, .0.cost)]
    NotConverged(Box<ErasureOutcome>),
    #[error("knot table: {0}")]
    Knots(String),
    #[error(transparent)]
    Csv(#[from] csv::Error),
}

pub type Result<T> = std::result::Result<T, DesignError>;
