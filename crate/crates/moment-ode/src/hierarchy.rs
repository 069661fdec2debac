use model_core::{BathSpec, DriveProtocol, EnsembleSpec, TwoByTwo};

use crate::cumulants::cumulants_from_moments;
use crate::error::{MomentError, Result};
use crate::problem::{compare, MomentProblem, SolverSettings};
use crate::rk4::{integrate, OdeSystem, Stage};
use crate::project_excited;

/// Taylor coefficients `G_0..G_N` of the tilted generating function and their
/// one-sided time derivatives at every grid node.
#[derive(Debug, Clone)]
pub struct MomentSeries {
    times: Vec<f64>,
    edot: Vec<f64>,
    g: Vec<Vec<TwoByTwo>>,
    dg: Vec<Vec<TwoByTwo>>,
    dg_after: Vec<Vec<TwoByTwo>>,
}

struct Hierarchy<'a> {
    problem: &'a MomentProblem,
    order: usize,
    /// `C_n` weights `int W^(n-1) a dF` for `n = 1..=order`, `[n - 1][fine]`.
    weights: Vec<Vec<f64>>,
}

impl Hierarchy<'_> {
    fn derivative(&self, i: usize, edot: f64, g: &[TwoByTwo]) -> Vec<TwoByTwo> {
        let r = self.problem.rate(i);
        (0..=self.order)
            .map(|n| {
                let mut d = -(r * g[n]);
                if n > 0 {
                    d += project_excited(g[n - 1]) * (n as f64 * edot);
                    let s = n as f64 * edot * self.weights[n - 1][i];
                    d += TwoByTwo::diag(-s, s);
                }
                d
            })
            .collect()
    }
}

impl OdeSystem for Hierarchy<'_> {
    fn dim(&self) -> usize {
        4 * (self.order + 1)
    }

    fn rhs(&self, at: Stage, y: &[f64], dy: &mut [f64]) {
        let d = self.derivative(at.fine, self.problem.edot_at(at), &unpack(y));
        pack_into(&d, dy);
    }
}

pub(crate) fn unpack(y: &[f64]) -> Vec<TwoByTwo> {
    y.chunks_exact(4).map(|c| TwoByTwo::new(c[0], c[1], c[2], c[3])).collect()
}

pub(crate) fn pack_into(m: &[TwoByTwo], out: &mut [f64]) {
    for (c, x) in out.chunks_exact_mut(4).zip(m) {
        c.copy_from_slice(&[x.ee, x.eg, x.ge, x.gg]);
    }
}

impl MomentProblem {
    /// Integrates the hierarchy up to order `order`.
    pub fn hierarchy(&self, order: usize) -> Result<MomentSeries> {
        let series = self.hierarchy_unchecked(order)?;
        if self.settings().check_resolution {
            let fine = self.refined()?.hierarchy_unchecked(order)?;
            let last = series.len() - 1;
            for n in 0..=order {
                compare(
                    format!("mu_{n}(tau)"),
                    series.moment(last, n),
                    fine.moment(fine.len() - 1, n),
                    self.settings().resolution_tol,
                )?;
            }
        }
        Ok(series)
    }

    fn hierarchy_unchecked(&self, order: usize) -> Result<MomentSeries> {
        if order == 0 || order > 4 {
            return Err(MomentError::Order(order));
        }
        let fine = self.fine();
        let weights = (1..=order as u32)
            .map(|n| (0..fine.len()).map(|i| self.kernels().moment_weight(n, i)).collect())
            .collect();
        let system = Hierarchy {
            problem: self,
            order,
            weights,
        };
        let mut g0 = vec![TwoByTwo::ZERO; order + 1];
        g0[0] = self.initial_state();
        let mut y0 = vec![0.0; system.dim()];
        pack_into(&g0, &mut y0);
        let states = integrate(&system, fine, &y0);
        let g: Vec<Vec<TwoByTwo>> = states.iter().map(|y| unpack(y)).collect();
        let rates = |edot: &dyn Fn(usize) -> f64| -> Vec<Vec<TwoByTwo>> {
            g.iter().enumerate().map(|(k, gk)| system.derivative(2 * k, edot(k), gk)).collect()
        };
        let dg = rates(&|k| self.node_edot(k));
        let dg_after = rates(&|k| self.node_edot_after(k));
        Ok(MomentSeries {
            times: self.nodes().to_vec(),
            edot: (0..g.len()).map(|k| self.node_edot(k)).collect(),
            g,
            dg,
            dg_after,
        })
    }
}

/// Moments `mu_0..mu_order` of the work distribution on the graded grid.
pub fn solve_moment_hierarchy(
    ensemble: &EnsembleSpec,
    protocol: &DriveProtocol,
    bath: &BathSpec,
    order: usize,
    settings: SolverSettings,
) -> Result<MomentSeries> {
    MomentProblem::new(ensemble, protocol, bath, settings)?.hierarchy(order)
}

impl MomentSeries {
    pub fn len(&self) -> usize {
        self.times.len()
    }

    pub fn is_empty(&self) -> bool {
        self.times.is_empty()
    }

    pub fn order(&self) -> usize {
        self.g[0].len() - 1
    }

    pub fn times(&self) -> &[f64] {
        &self.times
    }

    /// `Edot` at node `k`, approached from earlier times.
    pub fn edot(&self, k: usize) -> f64 {
        self.edot[k]
    }

    pub fn matrix(&self, k: usize, n: usize) -> TwoByTwo {
        self.g[k][n]
    }

    /// `dG_n/dt` at node `k`, approached from earlier times.
    pub fn matrix_rate(&self, k: usize, n: usize) -> TwoByTwo {
        self.dg[k][n]
    }

    /// `dG_n/dt` just after node `k`; differs from [`Self::matrix_rate`] at kinks.
    pub fn matrix_rate_after(&self, k: usize, n: usize) -> TwoByTwo {
        self.dg_after[k][n]
    }

    /// `mu_n(t_k)`: the sum of all entries of `G_n`.
    pub fn moment(&self, k: usize, n: usize) -> f64 {
        self.g[k][n].sum()
    }

    pub fn moment_rate(&self, k: usize, n: usize) -> f64 {
        self.dg[k][n].sum()
    }

    pub fn moment_rate_after(&self, k: usize, n: usize) -> f64 {
        self.dg_after[k][n].sum()
    }

    pub fn moments(&self, n: usize) -> Vec<f64> {
        (0..self.len()).map(|k| self.moment(k, n)).collect()
    }

    /// `<e|rho|e>` summed over rows: the mean excited population.
    pub fn excited_population(&self, k: usize) -> f64 {
        self.g[k][0].row_sums()[0]
    }

    pub fn cumulants(&self, k: usize) -> Vec<f64> {
        let top = self.order().min(4);
        let mu: Vec<f64> = (1..=top).map(|n| self.moment(k, n)).collect();
        cumulants_from_moments(&mu).expect("order capped at four")
    }

    pub fn variance(&self, k: usize) -> f64 {
        let m1 = self.moment(k, 1);
        self.moment(k, 2) - m1 * m1
    }

    pub fn last(&self) -> usize {
        self.len() - 1
    }
}
