use std::sync::OnceLock;

use model_core::quad::GaussRule;
use model_core::{rates, BathSpec, Coupling, DriveProtocol, ModelError};

use crate::error::{McError, Result};

/// Steps are subdivided until `(r_down + r_up) * dt` stays below this.
pub const MAX_STEP_HAZARD: f64 = 0.1;

const MAX_SPLITS: u32 = 60;

/// `1e-3 * tau / 5`.
pub fn default_dt(tau: f64) -> f64 {
    2e-4 * tau
}

/// Integrated rates over one step.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StepHazards {
    pub down: f64,
    pub up: f64,
    /// `int gamma dt = down - up`, computed without the cancellation.
    pub gamma: f64,
}

impl StepHazards {
    pub fn total(&self) -> f64 {
        self.down + self.up
    }
}

fn rule() -> &'static GaussRule {
    static RULE: OnceLock<GaussRule> = OnceLock::new();
    RULE.get_or_init(|| GaussRule::new(8))
}

/// Jump hazards `int r dt` over `[a, b]` by 8-point Gauss-Legendre.
pub fn step_hazards(protocol: &DriveProtocol, bath: &BathSpec, a: f64, b: f64) -> StepHazards {
    let (mut down, mut up, mut gamma) = (0.0, 0.0, 0.0);
    let r = rule();
    let h = b - a;
    for &(x, w) in r.unit_points() {
        let e = protocol.energy(a + h * x);
        let k = rates(e, bath);
        down += w * k.down;
        up += w * k.up;
        gamma += w * bath.gamma(e);
    }
    StepHazards {
        down: h * down,
        up: h * up,
        gamma: h * gamma,
    }
}

/// Step boundaries with per-step jump hazards `int r dt` and their prefix sums.
#[derive(Debug, Clone)]
pub struct StepPlan {
    protocol: DriveProtocol,
    bath: BathSpec,
    times: Vec<f64>,
    energy: Vec<f64>,
    h_down: Vec<f64>,
    h_up: Vec<f64>,
    /// Prefix sums, length `steps + 1`.
    cum_down: Vec<f64>,
    cum_up: Vec<f64>,
    /// Prefix sums of `int gamma dt`.
    cum_gamma: Vec<f64>,
}

impl StepPlan {
    /// Uniform steps of about `dt`, with protocol kinks and crossings of the
    /// gap floor added as boundaries, each step halved until its total hazard
    /// is below [`MAX_STEP_HAZARD`].
    pub fn new(protocol: &DriveProtocol, bath: &BathSpec, dt: f64) -> Result<Self> {
        if !(dt > 0.0 && dt.is_finite()) {
            return Err(ModelError::invalid("dt", "must be positive").into());
        }
        let tau = protocol.tau();
        let n = (tau / dt).round().max(1.0) as usize;
        let mut coarse: Vec<f64> = (0..=n).map(|i| tau * i as f64 / n as f64).collect();
        coarse.extend(protocol.kinks());
        if let Coupling::Constant { .. } = bath.coupling() {
            let crossings = floor_crossings(protocol, bath.gap_floor(), &coarse);
            coarse.extend(crossings);
        }
        coarse.sort_by(f64::total_cmp);
        coarse.dedup();
        let mut times = vec![0.0];
        for w in coarse.windows(2) {
            split(protocol, bath, w[0], w[1], 0, &mut times);
        }
        Self::from_times(protocol, bath, times)
    }

    /// Exactly the given boundaries, with no subdivision.
    pub fn from_times(protocol: &DriveProtocol, bath: &BathSpec, times: Vec<f64>) -> Result<Self> {
        if times.len() < 2
            || times[0] != 0.0
            || times.windows(2).any(|w| w[1] <= w[0])
            || (times[times.len() - 1] - protocol.tau()).abs() > 1e-12 * protocol.tau()
        {
            return Err(McError::Invalid("step boundaries must increase from 0 to tau".into()));
        }
        let energy: Vec<f64> = times.iter().map(|&t| protocol.energy(t)).collect();
        let steps = times.len() - 1;
        let (mut h_down, mut h_up, mut gam) = (Vec::with_capacity(steps), Vec::with_capacity(steps), Vec::with_capacity(steps));
        for k in 0..steps {
            let h = step_hazards(protocol, bath, times[k], times[k + 1]);
            h_down.push(h.down);
            h_up.push(h.up);
            gam.push(h.gamma);
        }
        Ok(StepPlan {
            protocol: protocol.clone(),
            bath: *bath,
            cum_down: prefix(&h_down),
            cum_up: prefix(&h_up),
            cum_gamma: prefix(&gam),
            times,
            energy,
            h_down,
            h_up,
        })
    }

    pub fn uniform(protocol: &DriveProtocol, bath: &BathSpec, steps: usize) -> Result<Self> {
        let tau = protocol.tau();
        Self::from_times(protocol, bath, (0..=steps).map(|i| tau * i as f64 / steps as f64).collect())
    }

    pub fn protocol(&self) -> &DriveProtocol {
        &self.protocol
    }

    pub fn bath(&self) -> &BathSpec {
        &self.bath
    }

    pub fn steps(&self) -> usize {
        self.times.len() - 1
    }

    pub fn times(&self) -> &[f64] {
        &self.times
    }

    pub fn energy(&self, k: usize) -> f64 {
        self.energy[k]
    }

    pub fn hazard_down(&self, k: usize) -> f64 {
        self.h_down[k]
    }

    pub fn hazard_up(&self, k: usize) -> f64 {
        self.h_up[k]
    }

    /// `sum_{j<k} h_down(j)`.
    pub fn cumulative_down(&self, k: usize) -> f64 {
        self.cum_down[k]
    }

    pub fn cumulative_up(&self, k: usize) -> f64 {
        self.cum_up[k]
    }

    /// `int_0^{t_k} gamma dt`, the log-odds drift of a null segment.
    pub fn cumulative_gamma(&self, k: usize) -> f64 {
        self.cum_gamma[k]
    }

    /// Excited population after `k` jump-free steps from `p_e`.
    pub fn null_population(&self, p_e: f64, k: usize) -> f64 {
        logistic(p_e.ln() - (1.0 - p_e).ln() - self.cum_gamma[k])
    }

    pub(crate) fn cum_down(&self) -> &[f64] {
        &self.cum_down
    }

    pub(crate) fn cum_up(&self) -> &[f64] {
        &self.cum_up
    }
}

pub(crate) fn logistic(x: f64) -> f64 {
    if x >= 0.0 {
        1.0 / (1.0 + (-x).exp())
    } else {
        let e = x.exp();
        e / (1.0 + e)
    }
}

fn prefix(h: &[f64]) -> Vec<f64> {
    let mut out = Vec::with_capacity(h.len() + 1);
    let mut acc = 0.0;
    out.push(0.0);
    for x in h {
        acc += x;
        out.push(acc);
    }
    out
}

fn split(protocol: &DriveProtocol, bath: &BathSpec, a: f64, b: f64, depth: u32, out: &mut Vec<f64>) {
    // Endpoint rates bound the hazard of a monotone rate and keep the
    // variation inside a step small enough for the Gauss rule.
    let peak = rates(protocol.energy(a), bath).total().max(rates(protocol.energy(b), bath).total());
    let hazard = (peak * (b - a)).max(step_hazards(protocol, bath, a, b).total());
    let m = 0.5 * (a + b);
    if hazard >= MAX_STEP_HAZARD && depth < MAX_SPLITS && m > a && m < b {
        split(protocol, bath, a, m, depth + 1, out);
        split(protocol, bath, m, b, depth + 1, out);
    } else {
        out.push(b);
    }
}

fn floor_crossings(protocol: &DriveProtocol, floor: f64, bounds: &[f64]) -> Vec<f64> {
    let level = |t: f64| protocol.energy(t) - floor;
    let mut out = Vec::new();
    for w in bounds.windows(2) {
        let (mut lo, mut hi) = (w[0], w[1]);
        let f_lo = level(lo);
        if f_lo * level(hi) >= 0.0 {
            continue;
        }
        loop {
            let m = 0.5 * (lo + hi);
            if m <= lo || m >= hi {
                break;
            }
            if level(m) * f_lo > 0.0 {
                lo = m;
            } else {
                hi = m;
            }
        }
        out.push(hi);
    }
    out
}
