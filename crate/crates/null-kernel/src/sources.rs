use model_core::{
    BathSpec, DriveProtocol, EnsembleSpec, GridSettings, PurePrep, Result, TimeGrid, TwoByTwo,
};

use crate::decay::DecayKernels;

/// Decay kernels together with the null work of every ensemble member.
#[derive(Debug, Clone)]
pub struct NullKernels {
    decay: DecayKernels,
    preps: Vec<PurePrep>,
    /// `[member][fine index]`.
    null_work: Vec<Vec<f64>>,
}

impl NullKernels {
    pub fn new(decay: DecayKernels, ensemble: &EnsembleSpec) -> Self {
        let preps = ensemble.resolve();
        let null_work = preps.iter().map(|p| decay.null_work_series(p.p_e())).collect();
        NullKernels {
            decay,
            preps,
            null_work,
        }
    }

    pub fn on_grid(
        protocol: &DriveProtocol,
        bath: &BathSpec,
        ensemble: &EnsembleSpec,
        grid: &TimeGrid,
    ) -> Self {
        Self::new(DecayKernels::new(protocol, bath, grid), ensemble)
    }

    pub fn graded(
        protocol: &DriveProtocol,
        bath: &BathSpec,
        ensemble: &EnsembleSpec,
        settings: &GridSettings,
    ) -> Result<Self> {
        Ok(Self::new(DecayKernels::graded(protocol, bath, settings)?, ensemble))
    }

    pub fn decay(&self) -> &DecayKernels {
        &self.decay
    }

    pub fn preps(&self) -> &[PurePrep] {
        &self.preps
    }

    pub fn fine(&self) -> &[f64] {
        self.decay.fine()
    }

    pub fn null_work(&self, member: usize, i: usize) -> f64 {
        self.null_work[member][i]
    }

    pub fn null_probability(&self, member: usize, i: usize) -> f64 {
        let p = self.preps[member];
        p.p_e() * self.decay.k_e(i) + p.p_g() * self.decay.k_g(i)
    }

    /// `p_e p_g K_e K_g / P_null`, evaluated as `p_g K_g * (p_e K_e / P_null)`.
    pub fn coherence_weight(&self, member: usize, i: usize) -> f64 {
        let p = self.preps[member];
        if p.is_eigenstate() {
            return 0.0;
        }
        p.p_g() * self.decay.k_g(i) * self.decay.excited_fraction(p.p_e(), i)
    }

    pub fn mean_coherence_weight(&self, i: usize) -> f64 {
        (0..self.preps.len())
            .map(|m| self.preps[m].weight() * self.coherence_weight(m, i))
            .sum()
    }

    /// `Edot` at fine index `i`, with a secant over the first fine interval at a singular start.
    pub fn edot(&self, i: usize) -> f64 {
        let fine = self.decay.fine();
        let h = if i + 1 < fine.len() { fine[i + 1] - fine[i] } else { fine[i] - fine[i - 1] };
        self.decay.protocol().edot_or_secant(fine[i], h)
    }

    /// `Edot` just before fine index `i`; equals [`Self::edot`] away from kinks.
    pub fn edot_left(&self, i: usize) -> f64 {
        if i == 0 {
            return self.edot(0);
        }
        let fine = self.decay.fine();
        let protocol = self.decay.protocol();
        let d = protocol.edot_left(fine[i]);
        if d.is_finite() {
            d
        } else {
            let h = fine[i] - fine[i - 1];
            (protocol.energy(fine[i]) - protocol.energy(fine[i - 1])) / h
        }
    }

    /// `int W_null^(n-1) a dF`.
    pub fn moment_weight(&self, n: u32, i: usize) -> f64 {
        (0..self.preps.len())
            .map(|m| {
                let a = self.coherence_weight(m, i);
                if a == 0.0 {
                    0.0
                } else {
                    self.preps[m].weight() * self.null_work[m][i].powi(n as i32 - 1) * a
                }
            })
            .sum()
    }

    /// `C_n = n Edot (|g><g| - |e><e|) int W_null^(n-1) a dF`; `C_0 = 0`.
    pub fn source_moment(&self, n: u32, i: usize) -> TwoByTwo {
        if n == 0 {
            return TwoByTwo::ZERO;
        }
        let s = n as f64 * self.edot(i) * self.moment_weight(n, i);
        TwoByTwo::diag(-s, s)
    }

    /// `int e^{-u W_null} a dF`.
    pub fn tilted_weight(&self, u: f64, i: usize) -> f64 {
        (0..self.preps.len())
            .map(|m| {
                let a = self.coherence_weight(m, i);
                if a == 0.0 {
                    0.0
                } else {
                    self.preps[m].weight() * (-u * self.null_work[m][i]).exp() * a
                }
            })
            .sum()
    }

    /// `C_null(u)` with `<e|C|e> = u Edot int e^{-u W_null} a dF = -<g|C|g>`.
    pub fn source_mgf(&self, u: f64, i: usize) -> TwoByTwo {
        let c = u * self.edot(i) * self.tilted_weight(u, i);
        TwoByTwo::diag(c, -c)
    }

    /// `C_null(u)` from its defining product
    /// `int e^{-u W_null} u (Hdot - Wdot_null) P_null dF` with `P_null = diag(p_e K_e, p_g K_g)`.
    pub fn source_mgf_direct(&self, u: f64, i: usize) -> TwoByTwo {
        let edot = self.edot(i);
        let (ke, kg) = (self.decay.k_e(i), self.decay.k_g(i));
        let mut out = TwoByTwo::ZERO;
        for (m, p) in self.preps.iter().enumerate() {
            let wdot = edot * self.decay.excited_fraction(p.p_e(), i);
            let tilt = p.weight() * u * (-u * self.null_work[m][i]).exp();
            out += TwoByTwo::diag(tilt * (edot - wdot) * ke * p.p_e(), -tilt * wdot * kg * p.p_g());
        }
        out
    }
}

/// Null work of `prep` at time `t`.
pub fn null_work(prep: &PurePrep, kernels: &DecayKernels, t: f64) -> f64 {
    kernels.interpolate(&kernels.null_work_series(prep.p_e()), t)
}

/// `P_null = p_e K_e + p_g K_g` at time `t`.
pub fn null_probability(prep: &PurePrep, kernels: &DecayKernels, t: f64) -> f64 {
    let (ke, kg) = kernels.kernels_at(t);
    prep.p_e() * ke + prep.p_g() * kg
}

/// Coherence weight `a = p_e p_g K_e K_g / P_null` at time `t`.
pub fn coherence_weight(prep: &PurePrep, kernels: &DecayKernels, t: f64) -> f64 {
    let (ke, kg) = kernels.kernels_at(t);
    let p_null = prep.p_e() * ke + prep.p_g() * kg;
    if prep.is_eigenstate() || p_null == 0.0 {
        return 0.0;
    }
    prep.p_e() * prep.p_g() * ke * kg / p_null
}

/// Ensemble-averaged coherence weight at time `t`.
pub fn ensemble_coherence_weight(kernels: &NullKernels, t: f64) -> f64 {
    let table: Vec<f64> = (0..kernels.fine().len()).map(|i| kernels.mean_coherence_weight(i)).collect();
    kernels.decay().interpolate(&table, t)
}

fn diag_at(kernels: &NullKernels, t: f64, f: impl Fn(usize) -> TwoByTwo) -> TwoByTwo {
    let (i, w) = kernels.decay().locate(t);
    if w == 0.0 {
        return f(i);
    }
    f(i) * (1.0 - w) + f(i + 1) * w
}

/// `C_n(t)`, interpolated between fine nodes.
pub fn coherence_source_moment(kernels: &NullKernels, t: f64, n: u32) -> TwoByTwo {
    diag_at(kernels, t, |i| kernels.source_moment(n, i))
}

/// `C_null(u, t)`, interpolated between fine nodes.
pub fn coherence_source_mgf(kernels: &NullKernels, u: f64, t: f64) -> TwoByTwo {
    diag_at(kernels, t, |i| kernels.source_mgf(u, i))
}
