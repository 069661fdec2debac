use model_core::quad::GaussRule;
use model_core::{
    rates, BathSpec, DriveProtocol, GridSettings, ModelError, Result, TimeGrid,
};

use crate::logistic;

const ORDER: usize = 8;

/// Survival kernels `K_e = exp(-int r_down)`, `K_g = exp(-int r_up)` on the fine grid.
#[derive(Debug, Clone)]
pub struct DecayKernels {
    protocol: DriveProtocol,
    bath: BathSpec,
    grid: TimeGrid,
    fine: Vec<f64>,
    lam_down: Vec<f64>,
    lam_up: Vec<f64>,
    /// `int_0^t gamma = lam_down - lam_up`, accumulated on its own.
    imbalance: Vec<f64>,
    /// Per fine interval and Gauss point: (weight * Edot, imbalance).
    samples: Vec<(f64, f64)>,
}

pub fn decay_kernels(protocol: &DriveProtocol, bath: &BathSpec, grid: &TimeGrid) -> DecayKernels {
    DecayKernels::new(protocol, bath, grid)
}

impl DecayKernels {
    pub fn new(protocol: &DriveProtocol, bath: &BathSpec, grid: &TimeGrid) -> Self {
        let fine = grid.with_midpoints();
        let rule = GaussRule::new(ORDER);
        let n = fine.len();
        let mut lam_down = vec![0.0; n];
        let mut lam_up = vec![0.0; n];
        let mut imbalance = vec![0.0; n];
        let mut samples = Vec::with_capacity((n - 1) * ORDER);
        for i in 0..n - 1 {
            let (a, b) = (fine[i], fine[i + 1]);
            let h = b - a;
            let (mut dd, mut du) = (0.0, 0.0);
            for &(x, w) in rule.unit_points() {
                let s = a + h * x;
                let r = rates(protocol.energy(s), bath);
                dd += w * r.down;
                du += w * r.up;
                let partial = rule.integrate(a, s, |q| bath.gamma(protocol.energy(q)));
                samples.push((w * h * protocol.edot(s), imbalance[i] + partial));
            }
            lam_down[i + 1] = lam_down[i] + dd * h;
            lam_up[i + 1] = lam_up[i] + du * h;
            imbalance[i + 1] = imbalance[i] + rule.integrate(a, b, |q| bath.gamma(protocol.energy(q)));
        }
        DecayKernels {
            protocol: protocol.clone(),
            bath: *bath,
            grid: grid.clone(),
            fine,
            lam_down,
            lam_up,
            imbalance,
            samples,
        }
    }

    /// Builds the kernels on a graded grid.
    pub fn graded(protocol: &DriveProtocol, bath: &BathSpec, settings: &GridSettings) -> Result<Self> {
        let grid = TimeGrid::graded(protocol, bath, settings)?;
        Ok(Self::new(protocol, bath, &grid))
    }

    pub fn protocol(&self) -> &DriveProtocol {
        &self.protocol
    }

    pub fn bath(&self) -> &BathSpec {
        &self.bath
    }

    pub fn grid(&self) -> &TimeGrid {
        &self.grid
    }

    /// Nodes and midpoints; node `k` of the grid is fine index `2k`.
    pub fn fine(&self) -> &[f64] {
        &self.fine
    }

    pub fn hazard_down(&self, i: usize) -> f64 {
        self.lam_down[i]
    }

    pub fn hazard_up(&self, i: usize) -> f64 {
        self.lam_up[i]
    }

    pub fn k_e(&self, i: usize) -> f64 {
        (-self.lam_down[i]).exp()
    }

    pub fn k_g(&self, i: usize) -> f64 {
        (-self.lam_up[i]).exp()
    }

    /// `(K_e, K_g)` at an arbitrary time, interpolating the exponents linearly.
    pub fn kernels_at(&self, t: f64) -> (f64, f64) {
        let (i, f) = self.locate(t);
        let ld = self.lam_down[i] + f * (self.lam_down[i + 1] - self.lam_down[i]);
        let lu = self.lam_up[i] + f * (self.lam_up[i + 1] - self.lam_up[i]);
        ((-ld).exp(), (-lu).exp())
    }

    /// Fine interval containing `t` and the fractional position inside it.
    pub fn locate(&self, t: f64) -> (usize, f64) {
        let n = self.fine.len();
        let t = t.clamp(0.0, self.fine[n - 1]);
        let i = (self.fine.partition_point(|&x| x <= t).max(1) - 1).min(n - 2);
        let f = (t - self.fine[i]) / (self.fine[i + 1] - self.fine[i]);
        (i, f)
    }

    /// Linear interpolation of a fine-grid table at `t`.
    pub fn interpolate(&self, table: &[f64], t: f64) -> f64 {
        let (i, f) = self.locate(t);
        table[i] + f * (table[i + 1] - table[i])
    }

    /// Cumulative null work of a preparation on the fine grid.
    pub fn null_work_series(&self, p_e: f64) -> Vec<f64> {
        let e0 = self.protocol.energy(0.0);
        if p_e == 1.0 {
            return self.fine.iter().map(|&t| self.protocol.energy(t) - e0).collect();
        }
        if p_e == 0.0 {
            return vec![0.0; self.fine.len()];
        }
        let logit = (p_e / (1.0 - p_e)).ln();
        let mut out = vec![0.0; self.fine.len()];
        for i in 0..self.fine.len() - 1 {
            let chunk = &self.samples[i * ORDER..(i + 1) * ORDER];
            let inc: f64 = chunk.iter().map(|&(wd, imb)| wd * logistic(logit - imb)).sum();
            out[i + 1] = out[i] + inc;
        }
        out
    }

    /// Excited fraction `p_e K_e / P_null` of a preparation at fine index `i`.
    pub fn excited_fraction(&self, p_e: f64, i: usize) -> f64 {
        if p_e == 0.0 || p_e == 1.0 {
            return p_e;
        }
        logistic((p_e / (1.0 - p_e)).ln() - self.imbalance[i])
    }
}

/// Compares kernels on the graded grid against a grid with doubled base
/// resolution; fails if any shared-node value moves by more than `tol`.
pub fn check_kernel_resolution(
    protocol: &DriveProtocol,
    bath: &BathSpec,
    settings: &GridSettings,
    tol: f64,
) -> Result<f64> {
    let coarse = DecayKernels::graded(protocol, bath, settings)?;
    let fine = DecayKernels::graded(protocol, bath, &settings.with_base(2 * settings.base_intervals))?;
    let mut worst: f64 = 0.0;
    for (k, &t) in coarse.grid().nodes().iter().enumerate() {
        if let Some(j) = fine.grid().find_node(t, 1e-14 * protocol.tau()) {
            worst = worst
                .max((coarse.k_e(2 * k) - fine.k_e(2 * j)).abs())
                .max((coarse.k_g(2 * k) - fine.k_g(2 * j)).abs());
        }
    }
    if worst > tol {
        return Err(ModelError::GridTooCoarse {
            quantity: "survival kernels",
            change: worst,
        });
    }
    Ok(worst)
}
