use crate::bath::{BathSpec, Coupling};
use crate::error::{ModelError, Result};
use crate::protocol::DriveProtocol;
use crate::quad::GaussRule;
use crate::thermo::rates;

/// Controls for [`TimeGrid::graded`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GridSettings {
    /// Number of uniform intervals before refinement.
    pub base_intervals: usize,
    /// Largest integrated jump hazard allowed in one interval.
    pub max_hazard: f64,
    /// Largest `beta * |dE|` allowed in one interval.
    pub max_energy_step: f64,
    /// Largest relative spread of the rates or of `Edot` inside one interval.
    pub max_variation: f64,
    /// Width in energy of the first interval when `Edot(0)` is singular.
    pub singular_energy_tol: f64,
    /// Largest error of Simpson's rule for `int Edot dt` over one interval.
    pub max_simpson_defect: f64,
    pub max_depth: u32,
}

impl Default for GridSettings {
    fn default() -> Self {
        GridSettings {
            base_intervals: 1000,
            max_hazard: 0.05,
            max_energy_step: 0.05,
            max_variation: 0.1,
            singular_energy_tol: 1e-12,
            max_simpson_defect: 1e-11,
            max_depth: 160,
        }
    }
}

impl GridSettings {
    pub fn with_base(self, base_intervals: usize) -> Self {
        GridSettings {
            base_intervals,
            ..self
        }
    }
}

/// Strictly increasing time nodes starting at 0.
#[derive(Debug, Clone, PartialEq)]
pub struct TimeGrid {
    nodes: Vec<f64>,
}

impl TimeGrid {
    pub fn from_nodes(nodes: Vec<f64>) -> Result<Self> {
        if nodes.len() < 2 || nodes[0] != 0.0 {
            return Err(ModelError::invalid("grid", "needs at least two nodes starting at 0"));
        }
        if let Some(i) = nodes.windows(2).position(|w| !(w[1] > w[0])) {
            return Err(ModelError::invalid(
                format!("grid[{}]", i + 1),
                "nodes must strictly increase",
            ));
        }
        Ok(TimeGrid { nodes })
    }

    pub fn uniform(tau: f64, intervals: usize) -> Result<Self> {
        if intervals == 0 || !(tau > 0.0) {
            return Err(ModelError::invalid("grid", "need tau > 0 and at least one interval"));
        }
        Self::from_nodes(uniform_nodes(tau, intervals))
    }

    /// Uniform base grid refined where rates, gap or drive speed change quickly,
    /// with breakpoints at protocol kinks and where the gap crosses the floor.
    pub fn graded(protocol: &DriveProtocol, bath: &BathSpec, settings: &GridSettings) -> Result<Self> {
        if settings.base_intervals == 0 {
            return Err(ModelError::invalid("grid", "base_intervals must be positive"));
        }
        let tau = protocol.tau();
        let min_width = MIN_RELATIVE_WIDTH * tau;
        let uniform = uniform_nodes(tau, settings.base_intervals);
        let mut breaks = protocol.kinks();
        if let Coupling::Constant { .. } = bath.coupling() {
            let mut probe = uniform.clone();
            probe.extend(&breaks);
            probe.sort_by(f64::total_cmp);
            breaks.extend(floor_crossings(protocol, bath.gap_floor(), &probe));
        }
        let base = merge_breakpoints(uniform, breaks, min_width);
        let refiner = Refiner {
            protocol,
            bath,
            settings,
            rule: GaussRule::new(4),
            singular_start: !protocol.edot(0.0).is_finite(),
        };
        let mut nodes = vec![0.0];
        for w in base.windows(2) {
            refiner.refine(w[0], w[1], 0, &mut nodes);
        }
        Self::from_nodes(nodes)
    }

    pub fn nodes(&self) -> &[f64] {
        &self.nodes
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn end(&self) -> f64 {
        *self.nodes.last().expect("non-empty")
    }

    /// Nodes interleaved with interval midpoints: node `k` sits at index `2k`.
    pub fn with_midpoints(&self) -> Vec<f64> {
        let mut out = Vec::with_capacity(2 * self.nodes.len() - 1);
        for w in self.nodes.windows(2) {
            out.push(w[0]);
            out.push(0.5 * (w[0] + w[1]));
        }
        out.push(self.end());
        out
    }

    /// Index of the node equal to `t` within `tol`, if any.
    pub fn find_node(&self, t: f64, tol: f64) -> Option<usize> {
        let i = self.nodes.partition_point(|&x| x < t - tol);
        (i < self.nodes.len() && (self.nodes[i] - t).abs() <= tol).then_some(i)
    }
}

/// Refinement stops at this width relative to the interval's position, so
/// every interval keeps a representable midpoint; breakpoints closer than
/// this fraction of the runtime are merged.
const MIN_RELATIVE_WIDTH: f64 = 1e-12;

/// Sorted union of `uniform` (which holds both endpoints) and the interior
/// `breaks`. A break within `tol` of another point replaces it, so kinks land
/// exactly on nodes; breaks that close to an endpoint are dropped.
fn merge_breakpoints(uniform: Vec<f64>, mut breaks: Vec<f64>, tol: f64) -> Vec<f64> {
    let (start, end) = (uniform[0], uniform[uniform.len() - 1]);
    breaks.retain(|&t| t - start > tol && end - t > tol);
    breaks.sort_by(f64::total_cmp);
    breaks.dedup_by(|a, b| *a - *b <= tol);
    let mut out: Vec<f64> = Vec::with_capacity(uniform.len() + breaks.len());
    let mut j = 0;
    for &u in &uniform {
        while j < breaks.len() && breaks[j] < u - tol {
            out.push(breaks[j]);
            j += 1;
        }
        let interior = u != start && u != end;
        if interior && j < breaks.len() && (breaks[j] - u).abs() <= tol {
            out.push(breaks[j]);
            j += 1;
        } else {
            out.push(u);
        }
    }
    out
}

fn uniform_nodes(tau: f64, intervals: usize) -> Vec<f64> {
    (0..=intervals)
        .map(|k| if k == intervals { tau } else { tau * k as f64 / intervals as f64 })
        .collect()
}

fn floor_crossings(protocol: &DriveProtocol, floor: f64, base: &[f64]) -> Vec<f64> {
    let mut out = Vec::new();
    for w in base.windows(2) {
        let (fa, fb) = (protocol.energy(w[0]) - floor, protocol.energy(w[1]) - floor);
        if fa * fb < 0.0 {
            let (mut lo, mut hi) = (w[0], w[1]);
            for _ in 0..200 {
                let mid = 0.5 * (lo + hi);
                if mid <= lo || mid >= hi {
                    break;
                }
                if (protocol.energy(mid) - floor) * fa > 0.0 {
                    lo = mid;
                } else {
                    hi = mid;
                }
            }
            out.push(0.5 * (lo + hi));
        }
    }
    out
}

struct Refiner<'a> {
    protocol: &'a DriveProtocol,
    bath: &'a BathSpec,
    settings: &'a GridSettings,
    rule: GaussRule,
    singular_start: bool,
}

impl Refiner<'_> {
    fn refine(&self, a: f64, b: f64, depth: u32, out: &mut Vec<f64>) {
        let m = 0.5 * (a + b);
        if depth < self.settings.max_depth && b - a >= 2.0 * MIN_RELATIVE_WIDTH * b.abs() && self.needs_split(a, b) {
            self.refine(a, m, depth + 1, out);
            self.refine(m, b, depth + 1, out);
        } else {
            out.push(b);
        }
    }

    fn total_rate(&self, t: f64) -> f64 {
        rates(self.protocol.energy(t), self.bath).total()
    }

    fn needs_split(&self, a: f64, b: f64) -> bool {
        let s = self.settings;
        let beta = self.bath.beta();
        let hazard = self.rule.integrate(a, b, |t| self.total_rate(t));
        if hazard > s.max_hazard {
            return true;
        }
        let de = beta * (self.protocol.energy(b) - self.protocol.energy(a)).abs();
        if de > s.max_energy_step {
            return true;
        }
        if a == 0.0 && self.singular_start {
            return de > beta * s.singular_energy_tol;
        }
        let m = 0.5 * (a + b);
        if hazard > 1e-9 && spread([self.total_rate(a), self.total_rate(m), self.total_rate(b)]) > s.max_variation {
            return true;
        }
        let speeds = [self.protocol.edot(a), self.protocol.edot(m), self.protocol.edot_left(b)];
        if de > 1e-10 && spread(speeds.map(f64::abs)) > s.max_variation {
            return true;
        }
        let simpson = (b - a) / 6.0 * (speeds[0] + 4.0 * speeds[1] + speeds[2]);
        let exact = self.protocol.energy(b) - self.protocol.energy(a);
        (simpson - exact).abs() > s.max_simpson_defect
    }
}

fn spread(v: [f64; 3]) -> f64 {
    let hi = v.iter().cloned().fold(f64::MIN, f64::max);
    let lo = v.iter().cloned().fold(f64::MAX, f64::min);
    if hi <= 0.0 {
        0.0
    } else {
        (hi - lo) / hi
    }
}
