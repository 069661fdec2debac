use model_core::{BathSpec, DriveProtocol, EnsembleSpec, GridSettings, TimeGrid, TwoByTwo};
use null_kernel::NullKernels;

use crate::error::{MomentError, Result};
use crate::rate_matrix;
use crate::rk4::Stage;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SolverSettings {
    pub grid: GridSettings,
    /// Re-solve with twice the base intervals and compare end values.
    pub check_resolution: bool,
    pub resolution_tol: f64,
}

impl Default for SolverSettings {
    fn default() -> Self {
        SolverSettings {
            grid: GridSettings::default(),
            check_resolution: true,
            resolution_tol: 1e-6,
        }
    }
}

impl SolverSettings {
    pub fn with_base(self, base_intervals: usize) -> Self {
        SolverSettings {
            grid: self.grid.with_base(base_intervals),
            ..self
        }
    }

    pub fn unchecked(self) -> Self {
        SolverSettings {
            check_resolution: false,
            ..self
        }
    }
}

/// Everything the deterministic solvers need, tabulated on one fine grid.
#[derive(Debug, Clone)]
pub struct MomentProblem {
    kernels: NullKernels,
    ensemble: EnsembleSpec,
    settings: SolverSettings,
    edot: Vec<f64>,
    edot_left: Vec<f64>,
    rate: Vec<TwoByTwo>,
}

impl MomentProblem {
    pub fn new(
        ensemble: &EnsembleSpec,
        protocol: &DriveProtocol,
        bath: &BathSpec,
        settings: SolverSettings,
    ) -> Result<Self> {
        let grid = TimeGrid::graded(protocol, bath, &settings.grid)?;
        Ok(Self::on_grid(ensemble, protocol, bath, &grid, settings))
    }

    pub fn on_grid(
        ensemble: &EnsembleSpec,
        protocol: &DriveProtocol,
        bath: &BathSpec,
        grid: &TimeGrid,
        settings: SolverSettings,
    ) -> Self {
        let kernels = NullKernels::on_grid(protocol, bath, ensemble, grid);
        let fine = kernels.fine();
        let edot = (0..fine.len()).map(|i| kernels.edot(i)).collect();
        let edot_left = (0..fine.len()).map(|i| kernels.edot_left(i)).collect();
        let rate = fine.iter().map(|&t| rate_matrix(protocol.energy(t), bath)).collect();
        MomentProblem {
            kernels,
            ensemble: ensemble.clone(),
            settings,
            edot,
            edot_left,
            rate,
        }
    }

    /// Same problem with every interval halved.
    pub fn refined(&self) -> Result<Self> {
        let grid = TimeGrid::from_nodes(self.fine().to_vec())?;
        let settings = self.settings.unchecked();
        Ok(Self::on_grid(&self.ensemble, self.protocol(), self.bath(), &grid, settings))
    }

    pub fn kernels(&self) -> &NullKernels {
        &self.kernels
    }

    pub fn ensemble(&self) -> &EnsembleSpec {
        &self.ensemble
    }

    pub fn settings(&self) -> &SolverSettings {
        &self.settings
    }

    pub fn protocol(&self) -> &DriveProtocol {
        self.kernels.decay().protocol()
    }

    pub fn bath(&self) -> &BathSpec {
        self.kernels.decay().bath()
    }

    pub fn fine(&self) -> &[f64] {
        self.kernels.fine()
    }

    pub fn nodes(&self) -> &[f64] {
        self.kernels.decay().grid().nodes()
    }

    pub(crate) fn edot_at(&self, at: Stage) -> f64 {
        if at.left {
            self.edot_left[at.fine]
        } else {
            self.edot[at.fine]
        }
    }

    /// `Edot` at node `k` as reached by the integration: the left limit except at `t = 0`.
    pub(crate) fn node_edot(&self, k: usize) -> f64 {
        if k == 0 {
            self.edot[0]
        } else {
            self.edot_left[2 * k]
        }
    }

    /// `Edot` just after node `k`, where the next interval starts.
    pub(crate) fn node_edot_after(&self, k: usize) -> f64 {
        self.edot[2 * k]
    }

    pub(crate) fn rate(&self, i: usize) -> TwoByTwo {
        self.rate[i]
    }

    pub(crate) fn initial_state(&self) -> TwoByTwo {
        let pe = self.ensemble.mean_excited();
        TwoByTwo::diag(pe, 1.0 - pe)
    }
}

pub(crate) fn compare(quantity: String, coarse: f64, fine: f64, tol: f64) -> Result<()> {
    let change = (coarse - fine).abs() / fine.abs().max(1e-12);
    if change > tol || !change.is_finite() {
        return Err(MomentError::Resolution {
            quantity,
            change,
            tol,
        });
    }
    Ok(())
}
