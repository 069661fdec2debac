use model_core::quad::GaussRule;
use model_core::{rates, BathSpec, DriveProtocol};

use crate::error::{OracleError, Result};

/// Largest step count accepted; paths grow as `2^N`.
pub const MAX_STEPS: usize = 16;

/// Stroboscopic jump process: in step `n` a jump down happens with probability
/// `p_e q_down(n)` and a jump up with `p_g q_up(n)`, at the frozen gap `E(t_n)`.
#[derive(Debug, Clone, PartialEq)]
pub struct DiscreteModel {
    times: Vec<f64>,
    energies: Vec<f64>,
    q_down: Vec<f64>,
    q_up: Vec<f64>,
}

impl DiscreteModel {
    pub fn from_probabilities(times: Vec<f64>, energies: Vec<f64>, q_down: Vec<f64>, q_up: Vec<f64>) -> Result<Self> {
        let n = q_down.len();
        if n == 0 || q_up.len() != n || times.len() != n + 1 || energies.len() != n + 1 {
            return Err(OracleError::Invalid("need N step probabilities and N + 1 times and energies".into()));
        }
        if n > MAX_STEPS {
            return Err(OracleError::TooManySteps(n));
        }
        if q_down.iter().chain(&q_up).any(|q| !(0.0..1.0).contains(q)) {
            return Err(OracleError::Invalid("jump probabilities must lie in [0, 1)".into()));
        }
        if times.windows(2).any(|w| !(w[1] > w[0])) || energies.iter().any(|e| !e.is_finite()) {
            return Err(OracleError::Invalid("times must increase and energies be finite".into()));
        }
        Ok(DiscreteModel {
            times,
            energies,
            q_down,
            q_up,
        })
    }

    /// `steps` equal steps over the protocol with `q = 1 - exp(-int r dt)`.
    pub fn from_protocol(protocol: &DriveProtocol, bath: &BathSpec, steps: usize) -> Result<Self> {
        if steps == 0 {
            return Err(OracleError::Invalid("need at least one step".into()));
        }
        let tau = protocol.tau();
        let times: Vec<f64> = (0..=steps).map(|i| tau * i as f64 / steps as f64).collect();
        let energies = times.iter().map(|&t| protocol.energy(t)).collect();
        let rule = GaussRule::new(8);
        let mut q_down = Vec::with_capacity(steps);
        let mut q_up = Vec::with_capacity(steps);
        for w in times.windows(2) {
            let down = rule.integrate(w[0], w[1], |t| rates(protocol.energy(t), bath).down);
            let up = rule.integrate(w[0], w[1], |t| rates(protocol.energy(t), bath).up);
            q_down.push(-(-down).exp_m1());
            q_up.push(-(-up).exp_m1());
        }
        Self::from_probabilities(times, energies, q_down, q_up)
    }

    pub fn steps(&self) -> usize {
        self.q_down.len()
    }

    pub fn times(&self) -> &[f64] {
        &self.times
    }

    pub fn energy(&self, n: usize) -> f64 {
        self.energies[n]
    }

    /// `E(t_{n+1}) - E(t_n)`.
    pub fn gap_change(&self, n: usize) -> f64 {
        self.energies[n + 1] - self.energies[n]
    }

    pub fn q_down(&self, n: usize) -> f64 {
        self.q_down[n]
    }

    pub fn q_up(&self, n: usize) -> f64 {
        self.q_up[n]
    }
}
