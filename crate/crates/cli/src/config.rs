use std::path::{Path, PathBuf};

use model_core::{ensemble_registry, BathSpec, Coupling, DriveProtocol, EnsembleSpec, GridSettings, PurePrep};
use moment_ode::SolverSettings;
use protocol_design::{protocol_registry, read_knots, ErasureSpec};
use serde::{Deserialize, Serialize};

use crate::error::{CliError, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Experiment {
    Simulate,
    Moments,
    Mgf,
    Jarzynski,
    Fdr,
    OptimalProtocol,
    Oracle,
    Fig2,
    Fig3,
    Fig4,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PrepConfig {
    pub p_e: f64,
    pub weight: f64,
}

/// A registry name with parameters, or an explicit list of pure states.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct EnsembleConfig {
    pub name: String,
    pub params: Vec<f64>,
    pub preps: Vec<PrepConfig>,
}

impl Default for EnsembleConfig {
    fn default() -> Self {
        EnsembleConfig {
            name: "eg".into(),
            params: Vec::new(),
            preps: Vec::new(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ProtocolConfig {
    pub name: String,
    pub params: Vec<f64>,
    pub tau: f64,
    /// Knot table to load instead of a named protocol; `tau` is then the last knot.
    pub knots: Option<PathBuf>,
}

impl Default for ProtocolConfig {
    fn default() -> Self {
        ProtocolConfig {
            name: "linear".into(),
            params: vec![0.5],
            tau: 5.0,
            knots: None,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum CouplingKind {
    Constant,
    Ohmic,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct BathConfig {
    pub beta: f64,
    pub coupling: CouplingKind,
    /// `gamma0` for constant coupling, `kappa` for Ohmic.
    pub strength: f64,
    pub gap_floor: f64,
}

impl Default for BathConfig {
    fn default() -> Self {
        BathConfig {
            beta: 1.0,
            coupling: CouplingKind::Constant,
            strength: 0.1,
            gap_floor: model_core::DEFAULT_GAP_FLOOR,
        }
    }
}

impl BathConfig {
    pub fn build(&self) -> Result<BathSpec> {
        let coupling = match self.coupling {
            CouplingKind::Constant => Coupling::Constant { gamma0: self.strength },
            CouplingKind::Ohmic => Coupling::Ohmic { kappa: self.strength },
        };
        Ok(BathSpec::new(self.beta, coupling, self.gap_floor)?)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SolverConfig {
    /// Base intervals of the graded ODE grid.
    pub grid: usize,
    /// Monte Carlo step; `None` picks the default for the runtime.
    pub dt: Option<f64>,
    pub trajectories: u64,
    pub seed: u64,
    /// Gauss–Legendre nodes for continuous ensembles.
    pub quad_nodes: usize,
    /// Re-solve on a halved grid and fail if the end values move.
    pub check_resolution: bool,
}

impl Default for SolverConfig {
    fn default() -> Self {
        SolverConfig {
            grid: GridSettings::default().base_intervals,
            dt: None,
            trajectories: 100_000,
            seed: 1,
            quad_nodes: model_core::DEFAULT_QUAD_NODES,
            check_resolution: true,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ErasureConfig {
    pub p_start: f64,
    pub p_end: f64,
    pub nodes: usize,
}

impl Default for ErasureConfig {
    fn default() -> Self {
        ErasureConfig {
            p_start: 0.5,
            p_end: 0.01,
            nodes: 200,
        }
    }
}

/// Everything one run needs. The output path is not echoed into files, so
/// identical runs into different directories produce identical bytes.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ExperimentConfig {
    pub experiment: Experiment,
    pub ensemble: EnsembleConfig,
    pub protocol: ProtocolConfig,
    pub bath: BathConfig,
    pub solver: SolverConfig,
    /// Work-statistics route for `moments`: `hierarchy`, `monte-carlo` or `oracle`.
    pub route: String,
    /// ξ route for `jarzynski`.
    pub xi_route: String,
    /// Runtimes for scans; empty means the experiment's own default.
    pub taus: Vec<f64>,
    /// Counting fields for `mgf` and `oracle`.
    pub u: Vec<f64>,
    pub oracle_steps: usize,
    pub erasure: ErasureConfig,
    /// Trajectories whose jump events `simulate` writes to `events.csv`.
    pub events: u64,
    #[serde(skip_serializing)]
    pub out: PathBuf,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        ExperimentConfig {
            experiment: Experiment::Moments,
            ensemble: EnsembleConfig::default(),
            protocol: ProtocolConfig::default(),
            bath: BathConfig::default(),
            solver: SolverConfig::default(),
            route: "hierarchy".into(),
            xi_route: "phi-alpha-ode".into(),
            taus: Vec::new(),
            u: vec![0.5, 1.0],
            oracle_steps: 8,
            erasure: ErasureConfig::default(),
            events: 0,
            out: PathBuf::from("out"),
        }
    }
}

/// A validated configuration.
#[derive(Debug, Clone)]
pub struct Setup {
    pub ensemble: EnsembleSpec,
    pub protocol: DriveProtocol,
    pub bath: BathSpec,
    pub settings: SolverSettings,
    pub dt: f64,
    pub trajectories: u64,
    pub seed: u64,
    pub oracle_steps: usize,
}

impl ExperimentConfig {
    pub fn from_file(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| CliError::io(path, e))?;
        Ok(serde_json::from_str(&text)?)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("config serializes")
    }

    pub fn build_ensemble(&self) -> Result<EnsembleSpec> {
        let e = &self.ensemble;
        if !e.preps.is_empty() {
            let preps = e
                .preps
                .iter()
                .map(|p| PurePrep::new(p.p_e, p.weight))
                .collect::<model_core::Result<Vec<_>>>()?;
            return Ok(EnsembleSpec::discrete("explicit", preps)?);
        }
        let registry = ensemble_registry();
        let factory = registry
            .get(&e.name)
            .map_err(|err| CliError::config("ensemble.name", err.to_string()))?;
        Ok(factory.build(&e.params, self.solver.quad_nodes)?)
    }

    pub fn build_protocol(&self) -> Result<DriveProtocol> {
        self.protocol_with_tau(self.protocol.tau)
    }

    /// The configured protocol family at runtime `tau`.
    pub fn protocol_with_tau(&self, tau: f64) -> Result<DriveProtocol> {
        let p = &self.protocol;
        if let Some(path) = &p.knots {
            let file = std::fs::File::open(path).map_err(|e| CliError::io(path, e))?;
            return Ok(read_knots(file)?);
        }
        let registry = protocol_registry();
        let factory = registry
            .get(&p.name)
            .map_err(|err| CliError::config("protocol.name", err.to_string()))?;
        if !(tau.is_finite() && tau > 0.0) {
            return Err(CliError::config("protocol.tau", format!("{tau} is not positive")));
        }
        Ok(factory.build(&p.params, tau)?)
    }

    pub fn solver_settings(&self) -> Result<SolverSettings> {
        if self.solver.grid == 0 {
            return Err(CliError::config("solver.grid", "needs at least one interval"));
        }
        let mut s = SolverSettings::default().with_base(self.solver.grid);
        s.check_resolution = self.solver.check_resolution;
        Ok(s)
    }

    pub fn erasure_spec(&self, tau: f64, bath: BathSpec) -> Result<ErasureSpec> {
        let e = &self.erasure;
        Ok(ErasureSpec::new(tau, bath)
            .with_p_start(e.p_start)?
            .with_p_end(e.p_end)?
            .with_nodes(e.nodes)?)
    }

    /// Checks every field before any computation starts.
    pub fn validate(&self) -> Result<Setup> {
        let ensemble = self.build_ensemble()?;
        let protocol = self.build_protocol()?;
        let bath = self.bath.build()?;
        let settings = self.solver_settings()?;
        let dt = self.solver.dt.unwrap_or_else(|| trajectory_mc::default_dt(protocol.tau()));
        if !(dt.is_finite() && dt > 0.0) {
            return Err(CliError::config("solver.dt", format!("{dt} is not positive")));
        }
        if self.solver.trajectories == 0 {
            return Err(CliError::config("solver.trajectories", "needs at least one trajectory"));
        }
        if self.solver.quad_nodes == 0 {
            return Err(CliError::config("solver.quad_nodes", "needs at least one node"));
        }
        if let Some(t) = self.taus.iter().find(|t| !(t.is_finite() && **t > 0.0)) {
            return Err(CliError::config("taus", format!("{t} is not positive")));
        }
        if let Some(u) = self.u.iter().find(|u| !u.is_finite()) {
            return Err(CliError::config("u", format!("{u} is not finite")));
        }
        if !(1..=oracle_enum::MAX_STEPS).contains(&self.oracle_steps) {
            return Err(CliError::config(
                "oracle_steps",
                format!("{} is outside 1..={}", self.oracle_steps, oracle_enum::MAX_STEPS),
            ));
        }
        crate::routes::work_routes()
            .get(&self.route)
            .map_err(|e| CliError::config("route", e.to_string()))?;
        fluctuation_analysis::xi_routes()
            .get(&self.xi_route)
            .map_err(|e| CliError::config("xi_route", e.to_string()))?;
        self.erasure_spec(protocol.tau(), bath)?;
        Ok(Setup {
            ensemble,
            protocol,
            bath,
            settings,
            dt,
            trajectories: self.solver.trajectories,
            seed: self.solver.seed,
            oracle_steps: self.oracle_steps,
        })
    }
}
