//! Configuration, experiment dispatch and CSV output for `worktraj`.

mod config;
mod error;
mod experiments;
mod figures;
mod output;
mod routes;

pub use config::{
    BathConfig, CouplingKind, EnsembleConfig, ErasureConfig, Experiment, ExperimentConfig, PrepConfig,
    ProtocolConfig, Setup, SolverConfig,
};
pub use error::{CliError, Result};
pub use experiments::run;
pub use figures::{FIG2_LINEAR_TAUS, FIG2_OPTIMAL_TAUS, FIG3_PROTOCOLS, FIG3_TAUS, FIG4A_TAUS, FIG4BC_TAUS};
pub use output::{read_config, read_table, write_all, write_artifact, Artifact, Body, Table};
pub use routes::{work_routes, StatsRow, WorkRoute};

/// Environment variable that caps the worker threads.
pub const THREADS_ENV: &str = "WORKTRAJ_THREADS";
