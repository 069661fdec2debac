use model_core::{rates, BathSpec, Coupling, DriveProtocol, ModelError, PiecewiseLinear};

use crate::error::{DesignError, Result};
use crate::quasi_newton::{minimize, MinimizeSettings};

/// Ramp width between plateaus, relative to the node spacing.
const RAMP_FRACTION: f64 = 1e-6;
const SWEEPS: usize = 4;

/// Erasure from `p_start` to `p_end` in time `tau` on a grid of `nodes` intervals.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ErasureSpec {
    tau: f64,
    p_start: f64,
    p_end: f64,
    bath: BathSpec,
    nodes: usize,
}

impl ErasureSpec {
    /// `p_start = 1/2`, `p_end = 0.01`, 200 nodes.
    pub fn new(tau: f64, bath: BathSpec) -> Self {
        ErasureSpec {
            tau,
            p_start: 0.5,
            p_end: 0.01,
            bath,
            nodes: 200,
        }
    }

    pub fn with_p_end(self, p_end: f64) -> Result<Self> {
        let s = ErasureSpec { p_end, ..self };
        s.validate()?;
        Ok(s)
    }

    pub fn with_p_start(self, p_start: f64) -> Result<Self> {
        let s = ErasureSpec { p_start, ..self };
        s.validate()?;
        Ok(s)
    }

    pub fn with_nodes(self, nodes: usize) -> Result<Self> {
        let s = ErasureSpec { nodes, ..self };
        s.validate()?;
        Ok(s)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.tau.is_finite() && self.tau > 0.0) {
            return Err(ModelError::invalid("erasure.tau", "must be positive").into());
        }
        if !(0.0 < self.p_end && self.p_end < self.p_start && self.p_start <= 0.5) {
            return Err(ModelError::invalid("erasure.p_end", "need 0 < p_end < p_start <= 1/2").into());
        }
        if self.nodes < 2 {
            return Err(ModelError::invalid("erasure.nodes", "need at least two intervals").into());
        }
        Ok(())
    }

    pub fn tau(&self) -> f64 {
        self.tau
    }

    pub fn p_start(&self) -> f64 {
        self.p_start
    }

    pub fn p_end(&self) -> f64 {
        self.p_end
    }

    pub fn bath(&self) -> &BathSpec {
        &self.bath
    }

    pub fn nodes(&self) -> usize {
        self.nodes
    }
}

#[derive(Debug, Clone)]
pub struct ErasureOutcome {
    /// Plateaus joined by steep ramps, starting from the equilibrium gap of `p_start`.
    pub protocol: DriveProtocol,
    /// Mean work `sum_j p_j (E_j - E_{j-1})`.
    pub cost: f64,
    /// Population at each node, `p_start` to `p_end`.
    pub populations: Vec<f64>,
    /// Plateau gap on each interval.
    pub energies: Vec<f64>,
    pub iterations: usize,
}

/// Shortest feasible erasure time: `ln(p_start / p_end) / gamma0` for constant
/// coupling, where the fastest decay is `p_e e^{-gamma0 t}`; none for Ohmic coupling.
pub fn minimum_erasure_time(spec: &ErasureSpec) -> Option<f64> {
    match spec.bath.coupling() {
        Coupling::Constant { gamma0 } => Some((spec.p_start / spec.p_end).ln() / gamma0),
        Coupling::Ohmic { .. } => None,
    }
}

/// Piecewise-constant gaps that carry the population through prescribed node values.
struct Chain {
    bath: BathSpec,
    plateau: f64,
    start_energy: f64,
    /// Largest per-interval decay factor allowed, `e^{-gamma0 h}` (0 for Ohmic).
    speed_limit: f64,
}

impl Chain {
    fn new(spec: &ErasureSpec) -> Self {
        let h = spec.tau / spec.nodes as f64;
        let plateau = h * (1.0 - RAMP_FRACTION);
        let beta = spec.bath.beta();
        let speed_limit = match spec.bath.coupling() {
            Coupling::Constant { gamma0 } => (-gamma0 * plateau).exp(),
            Coupling::Ohmic { .. } => 0.0,
        };
        Chain {
            bath: spec.bath,
            plateau,
            start_energy: ((1.0 - spec.p_start) / spec.p_start).ln() / beta,
            speed_limit,
        }
    }

    fn relaxed(&self, e: f64, p0: f64) -> f64 {
        let r = rates(e, &self.bath);
        let target = r.up / r.total();
        target + (p0 - target) * (-r.total() * self.plateau).exp()
    }

    /// Gap that relaxes `p0` to `p1` over one plateau; the result decreases in the gap.
    fn invert(&self, p0: f64, p1: f64) -> Option<f64> {
        if self.relaxed(0.0, p0) < p1 {
            return None;
        }
        let mut hi = 1.0 / self.bath.beta();
        while self.relaxed(hi, p0) >= p1 {
            hi *= 2.0;
            if hi * self.bath.beta() > 700.0 {
                return None;
            }
        }
        let mut lo = 0.0;
        for _ in 0..200 {
            let mid = 0.5 * (lo + hi);
            if mid <= lo || mid >= hi || hi - lo <= 2.0 * f64::EPSILON * hi {
                break;
            }
            if self.relaxed(mid, p0) >= p1 {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        Some(0.5 * (lo + hi))
    }

    fn energies(&self, p: &[f64]) -> Option<Vec<f64>> {
        p.windows(2).map(|w| self.invert(w[0], w[1])).collect()
    }

    fn cost_of(&self, p: &[f64], e: &[f64]) -> f64 {
        let mut prev = self.start_energy;
        let mut w = 0.0;
        for (j, &ej) in e.iter().enumerate() {
            w += p[j] * (ej - prev);
            prev = ej;
        }
        w
    }

    fn cost(&self, p: &[f64]) -> f64 {
        if p.windows(2).any(|w| w[1] > w[0]) {
            return f64::INFINITY;
        }
        match self.energies(p) {
            Some(e) => self.cost_of(p, &e),
            None => f64::INFINITY,
        }
    }

    /// Terms of the cost that depend on node `k`, with `p_k = x`.
    fn local(&self, p: &[f64], e: &[f64], k: usize, x: f64) -> f64 {
        let (Some(left), Some(right)) = (self.invert(p[k - 1], x), self.invert(x, p[k + 1])) else {
            return f64::INFINITY;
        };
        let before = if k >= 2 { e[k - 2] } else { self.start_energy };
        let mut w = p[k - 1] * (left - before) + x * (right - left);
        if k + 1 < e.len() {
            w += p[k + 1] * (e[k + 1] - right);
        }
        w
    }

    /// Feasible monotone window for node `k`.
    fn window(&self, p: &[f64], k: usize) -> (f64, f64) {
        let lo = p[k + 1].max(p[k - 1] * self.speed_limit * (1.0 + 1e-12));
        let hi = if self.speed_limit > 0.0 {
            p[k - 1].min(p[k + 1] / self.speed_limit * (1.0 - 1e-12))
        } else {
            p[k - 1]
        };
        (lo, hi)
    }

    fn sweep(&self, p: &mut [f64]) {
        let Some(mut e) = self.energies(p) else { return };
        let inv_phi = 0.5 * (5f64.sqrt() - 1.0);
        for k in 1..p.len() - 1 {
            let (mut a, mut b) = self.window(p, k);
            if !(b > a) {
                continue;
            }
            let f = |x: f64| self.local(p, &e, k, x);
            let mut c = b - inv_phi * (b - a);
            let mut d = a + inv_phi * (b - a);
            let (mut fc, mut fd) = (f(c), f(d));
            for _ in 0..60 {
                if fc < fd {
                    b = d;
                    d = c;
                    fd = fc;
                    c = b - inv_phi * (b - a);
                    fc = f(c);
                } else {
                    a = c;
                    c = d;
                    fc = fd;
                    d = a + inv_phi * (b - a);
                    fd = f(d);
                }
            }
            let x = 0.5 * (a + b);
            if f(x) < f(p[k]) {
                p[k] = x;
                e[k - 1] = self.invert(p[k - 1], x).expect("inside the window");
                e[k] = self.invert(x, p[k + 1]).expect("inside the window");
            }
        }
    }

    /// Central differences of the local cost, one node at a time.
    fn gradient(&self, p: &[f64]) -> Vec<f64> {
        let Some(e) = self.energies(p) else {
            return vec![0.0; p.len() - 2];
        };
        (1..p.len() - 1)
            .map(|k| {
                let h = 1e-7 * p[k];
                let (lo, hi) = self.window(p, k);
                let (a, b) = ((p[k] - h).max(lo), (p[k] + h).min(hi));
                if !(b > a) {
                    return 0.0;
                }
                (self.local(p, &e, k, b) - self.local(p, &e, k, a)) / (b - a)
            })
            .collect()
    }

    fn protocol(&self, spec: &ErasureSpec, e: &[f64]) -> Result<DriveProtocol> {
        let m = spec.nodes;
        let h = spec.tau / m as f64;
        let ramp = RAMP_FRACTION * h;
        let mut knots = Vec::with_capacity(2 * m + 1);
        knots.push((0.0, self.start_energy));
        for (j, &ej) in e.iter().enumerate() {
            let end = if j + 1 == m { spec.tau } else { (j + 1) as f64 * h };
            knots.push((j as f64 * h + ramp, ej));
            knots.push((end, ej));
        }
        Ok(DriveProtocol::from_schedule(PiecewiseLinear::new(knots)?, spec.tau)?)
    }
}

/// Population decaying geometrically from `p_start` to `p_end`.
fn geometric_path(spec: &ErasureSpec) -> Vec<f64> {
    let m = spec.nodes;
    let ratio = spec.p_end / spec.p_start;
    let mut p: Vec<f64> = (0..=m).map(|j| spec.p_start * ratio.powf(j as f64 / m as f64)).collect();
    p[m] = spec.p_end;
    p
}

fn feasible_start(spec: &ErasureSpec, chain: &Chain) -> Result<Vec<f64>> {
    spec.validate()?;
    let p = geometric_path(spec);
    if let Some(node) = p.windows(2).position(|w| chain.invert(w[0], w[1]).is_none()) {
        return Err(DesignError::Infeasible {
            tau: spec.tau,
            min_tau: minimum_erasure_time(spec).unwrap_or(0.0),
            node,
        });
    }
    Ok(p)
}

/// Cost of the geometric population path, the reference any optimum must beat.
pub fn baseline_cost(spec: &ErasureSpec) -> Result<f64> {
    let chain = Chain::new(spec);
    Ok(chain.cost(&feasible_start(spec, &chain)?))
}

/// Log-ratio weights `w = softmax(z)` give `ln(p_{k+1} / p_k) = ln(p_end / p_start) w_k`,
/// so every path is monotone and ends exactly at `p_end`.
struct Softmax {
    p_start: f64,
    log_ratio: f64,
}

impl Softmax {
    fn weights(z: &[f64]) -> Vec<f64> {
        let top = z.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
        let e: Vec<f64> = z.iter().map(|v| (v - top).exp()).collect();
        let s: f64 = e.iter().sum();
        e.into_iter().map(|v| v / s).collect()
    }

    fn path(&self, z: &[f64]) -> Vec<f64> {
        let w = Self::weights(z);
        let mut p = Vec::with_capacity(w.len() + 1);
        let mut acc = 0.0;
        p.push(self.p_start);
        for wk in &w[..w.len() - 1] {
            acc += wk;
            p.push(self.p_start * (self.log_ratio * acc).exp());
        }
        p.push(self.p_start * self.log_ratio.exp());
        p
    }

    fn coordinates(&self, p: &[f64]) -> Vec<f64> {
        p.windows(2)
            .map(|w| ((w[1] / w[0]).ln() / self.log_ratio).max(1e-12).ln())
            .collect()
    }

    /// Chain rule from the gradient at interior nodes to `z`.
    fn pull_back(&self, z: &[f64], p: &[f64], grad_p: &[f64]) -> Vec<f64> {
        let w = Self::weights(z);
        let m = w.len();
        // dC/dw_i = L sum_{k > i} p_k dC/dp_k over interior k.
        let mut dw = vec![0.0; m];
        let mut tail = 0.0;
        for i in (0..m).rev() {
            dw[i] = self.log_ratio * tail;
            if i >= 1 {
                tail += p[i] * grad_p[i - 1];
            }
        }
        let mean: f64 = w.iter().zip(&dw).map(|(a, b)| a * b).sum();
        w.iter().zip(&dw).map(|(wi, di)| wi * (di - mean)).collect()
    }
}

/// Minimum mean work over population paths with fixed endpoints.
///
/// Each interval holds a constant gap found by inverting the exact relaxation
/// between its end populations; the gap may jump between intervals. The path
/// is improved by golden-section coordinate sweeps and then polished by BFGS
/// with finite-difference gradients over softmax log-ratio coordinates.
pub fn optimize_erasure_protocol(spec: &ErasureSpec) -> Result<ErasureOutcome> {
    let chain = Chain::new(spec);
    let mut p = feasible_start(spec, &chain)?;
    for _ in 0..SWEEPS {
        chain.sweep(&mut p);
    }
    let map = Softmax {
        p_start: spec.p_start,
        log_ratio: (spec.p_end / spec.p_start).ln(),
    };
    let best = minimize(
        |z| chain.cost(&map.path(z)),
        |z| {
            let q = map.path(z);
            map.pull_back(z, &q, &chain.gradient(&q))
        },
        map.coordinates(&p),
        &MinimizeSettings::default(),
    );
    let mut p = map.path(&best.x);
    let swept = chain.cost(&p);
    if !(swept.is_finite()) {
        p = feasible_start(spec, &chain)?;
    }
    let energies = chain.energies(&p).expect("optimizer keeps the path feasible");
    let outcome = ErasureOutcome {
        protocol: chain.protocol(spec, &energies)?,
        cost: chain.cost_of(&p, &energies),
        populations: p,
        energies,
        iterations: best.iterations,
    };
    if best.converged {
        Ok(outcome)
    } else {
        Err(DesignError::NotConverged(Box::new(outcome)))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn softmax_gradient_matches_differences() {
        let spec = ErasureSpec::new(100.0, BathSpec::constant(1.0, 0.1).unwrap()).with_nodes(12).unwrap();
        let chain = Chain::new(&spec);
        let map = Softmax { p_start: 0.5, log_ratio: (0.02f64).ln() };
        let z: Vec<f64> = (0..12).map(|i| 0.1 * (i as f64).sin()).collect();
        let p = map.path(&z);
        let g = map.pull_back(&z, &p, &chain.gradient(&p));
        for j in 0..12 {
            let h = 1e-6;
            let mut a = z.clone();
            let mut b = z.clone();
            a[j] -= h;
            b[j] += h;
            let fd = (chain.cost(&map.path(&b)) - chain.cost(&map.path(&a))) / (2.0 * h);
            assert!((fd - g[j]).abs() < 1e-6 * (1.0 + fd.abs()), "{j}: {fd} vs {}", g[j]);
        }
    }
}
