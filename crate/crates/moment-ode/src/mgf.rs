use model_core::{BathSpec, DriveProtocol, EnsembleSpec, TwoByTwo};

use crate::error::Result;
use crate::hierarchy::{pack_into, unpack};
use crate::problem::{compare, MomentProblem, SolverSettings};
use crate::rk4::{integrate, OdeSystem, Stage};
use crate::project_excited;

/// `G(u, t)` for several `u` at every grid node.
#[derive(Debug, Clone)]
pub struct MgfSeries {
    times: Vec<f64>,
    u: Vec<f64>,
    /// `[node][u index]`.
    g: Vec<Vec<TwoByTwo>>,
}

struct Tilted<'a> {
    problem: &'a MomentProblem,
    u: &'a [f64],
    /// `u int e^{-u W_null} a dF`, `[u index][fine]`; times `Edot` gives `<e|C_null|e>`.
    source: Vec<Vec<f64>>,
}

impl OdeSystem for Tilted<'_> {
    fn dim(&self) -> usize {
        4 * self.u.len()
    }

    fn rhs(&self, at: Stage, y: &[f64], dy: &mut [f64]) {
        let r = self.problem.rate(at.fine);
        let edot = self.problem.edot_at(at);
        let d: Vec<TwoByTwo> = unpack(y)
            .into_iter()
            .zip(self.u)
            .zip(&self.source)
            .map(|((g, &u), c)| {
                let s = c[at.fine] * edot;
                project_excited(g) * (-u * edot) - r * g + TwoByTwo::diag(s, -s)
            })
            .collect();
        pack_into(&d, dy);
    }
}

impl MomentProblem {
    pub fn mgf(&self, u: &[f64]) -> Result<MgfSeries> {
        let series = self.mgf_unchecked(u);
        if self.settings().check_resolution {
            let fine = self.refined()?.mgf_unchecked(u);
            for (j, uj) in u.iter().enumerate() {
                compare(
                    format!("G({uj}, tau)"),
                    series.value(series.len() - 1, j),
                    fine.value(fine.len() - 1, j),
                    self.settings().resolution_tol,
                )?;
            }
        }
        Ok(series)
    }

    fn mgf_unchecked(&self, u: &[f64]) -> MgfSeries {
        let n = self.fine().len();
        let source = u
            .iter()
            .map(|&uj| (0..n).map(|i| uj * self.kernels().tilted_weight(uj, i)).collect())
            .collect();
        let system = Tilted {
            problem: self,
            u,
            source,
        };
        let mut y0 = vec![0.0; system.dim()];
        pack_into(&vec![self.initial_state(); u.len()], &mut y0);
        let g = integrate(&system, self.fine(), &y0).iter().map(|y| unpack(y)).collect();
        MgfSeries {
            times: self.nodes().to_vec(),
            u: u.to_vec(),
            g,
        }
    }
}

pub fn solve_mgf(
    ensemble: &EnsembleSpec,
    protocol: &DriveProtocol,
    bath: &BathSpec,
    u: &[f64],
    settings: SolverSettings,
) -> Result<MgfSeries> {
    MomentProblem::new(ensemble, protocol, bath, settings)?.mgf(u)
}

impl MgfSeries {
    pub fn len(&self) -> usize {
        self.times.len()
    }

    pub fn is_empty(&self) -> bool {
        self.times.is_empty()
    }

    pub fn times(&self) -> &[f64] {
        &self.times
    }

    pub fn u(&self) -> &[f64] {
        &self.u
    }

    pub fn matrix(&self, k: usize, j: usize) -> TwoByTwo {
        self.g[k][j]
    }

    /// `G(u_j, t_k)`: the sum of all entries.
    pub fn value(&self, k: usize, j: usize) -> f64 {
        self.g[k][j].sum()
    }

    /// `G(u_j, tau)`.
    pub fn final_value(&self, j: usize) -> f64 {
        self.value(self.len() - 1, j)
    }
}
