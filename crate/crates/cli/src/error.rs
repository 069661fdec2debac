use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("config field `{field}`: {reason}")]
    Config { field: String, reason: String },
    #[error(transparent)]
    Model(#[from] model_core::ModelError),
    #[error(transparent)]
    Moments(#[from] moment_ode::MomentError),
    #[error(transparent)]
    MonteCarlo(#[from] trajectory_mc::McError),
    #[error(transparent)]
    Fluctuation(#[from] fluctuation_analysis::FluctuationError),
    #[error(transparent)]
    Design(#[from] protocol_design::DesignError),
    #[error(transparent)]
    Oracle(#[from] oracle_enum::OracleError),
    #[error("{path}: {source}")]
    Io { path: String, source: std::io::Error },
    #[error(transparent)]
    Csv(#[from] csv::Error),
    #[error("config json: {0}")]
    Json(#[from] serde_json::Error),
    #[error("{0} has no `# config` line")]
    NoConfig(String),
}

impl CliError {
    pub fn config(field: impl Into<String>, reason: impl Into<String>) -> Self {
        CliError::Config {
            field: field.into(),
            reason: reason.into(),
        }
    }

    pub(crate) fn io(path: &std::path::Path, source: std::io::Error) -> Self {
        CliError::Io {
            path: path.display().to_string(),
            source,
        }
    }
}

pub type Result<T> = std::result::Result<T, CliError>;
