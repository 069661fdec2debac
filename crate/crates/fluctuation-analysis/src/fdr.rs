use model_core::{relaxation_time, BathSpec, DriveProtocol, EnsembleSpec};
use moment_ode::{MomentProblem, MomentSeries, SolverSettings};

use crate::error::Result;
use crate::quadrature::cumulative;
use crate::variance::{check_alignment, on_fine};
use crate::xi::xi_from_ode;

/// End-time fluctuation-dissipation quantities for one runtime.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FdrRow {
    pub tau: f64,
    pub sigma2_rate: f64,
    /// The same derivative from a five-point one-sided stencil on the nodes.
    pub sigma2_rate_stencil: f64,
    pub wdiss_rate: f64,
    /// `sigma2_rate - 2 wdiss_rate / beta`.
    pub d_cl: f64,
    /// `-2 abar lambda Edot^2`.
    pub prediction: f64,
    pub lambda: f64,
    pub abar: f64,
    pub edot: f64,
}

impl FdrRow {
    pub fn ratio(&self) -> f64 {
        self.d_cl / self.prediction
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct FdrReport {
    pub rows: Vec<FdrRow>,
}

/// Derivative at `xs[last]` of the Lagrange polynomial through the points.
fn one_sided_derivative(xs: &[f64], ys: &[f64]) -> f64 {
    let n = xs.len();
    let x = xs[n - 1];
    let mut total = 0.0;
    for j in 0..n {
        let denom: f64 = (0..n).filter(|&m| m != j).map(|m| xs[j] - xs[m]).product();
        let numer: f64 = (0..n)
            .filter(|&m| m != j)
            .map(|m| {
                (0..n)
                    .filter(|&l| l != j && l != m)
                    .map(|l| x - xs[l])
                    .product::<f64>()
            })
            .sum();
        total += ys[j] * numer / denom;
    }
    total
}

fn fdr_row(problem: &MomentProblem, series: &MomentSeries) -> FdrRow {
    let beta = problem.bath().beta();
    let k = series.last();
    let tau = series.times()[k];
    let i = problem.fine().len() - 1;
    let edot = problem.kernels().edot_left(i);
    let mu1 = series.moment(k, 1);
    let sigma2_rate = series.moment_rate(k, 2) - 2.0 * mu1 * series.moment_rate(k, 1);
    let p_eq = model_core::equilibrium_population(problem.protocol().energy(tau), beta);
    let wdiss_rate = series.moment_rate(k, 1) - edot * p_eq;
    let lambda = relaxation_time(problem.protocol().energy(tau), problem.bath());
    let abar = problem.kernels().mean_coherence_weight(i);
    let lo = k.saturating_sub(4);
    let xs = &series.times()[lo..=k];
    let var: Vec<f64> = (lo..=k).map(|j| series.variance(j)).collect();
    FdrRow {
        tau,
        sigma2_rate,
        sigma2_rate_stencil: one_sided_derivative(xs, &var),
        wdiss_rate,
        d_cl: sigma2_rate - 2.0 * wdiss_rate / beta,
        prediction: -2.0 * abar * lambda * edot * edot,
        lambda,
        abar,
        edot,
    }
}

/// End-time FDR defect for each runtime of a protocol family.
pub fn fdr_scan(
    ensemble: &EnsembleSpec,
    family: &dyn Fn(f64) -> model_core::Result<DriveProtocol>,
    bath: &BathSpec,
    taus: &[f64],
    settings: SolverSettings,
) -> Result<FdrReport> {
    let rows = taus
        .iter()
        .map(|&tau| {
            let problem = MomentProblem::new(ensemble, &family(tau)?, bath, settings)?;
            let series = problem.hierarchy(2)?;
            Ok(fdr_row(&problem, &series))
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(FdrReport { rows })
}

/// Slow-driving cumulant rates and their running integrals on the nodes.
#[derive(Debug, Clone, PartialEq)]
pub struct SlowCumulants {
    pub times: Vec<f64>,
    pub kappa3_rate: Vec<f64>,
    pub kappa4_rate: Vec<f64>,
    pub kappa3: Vec<f64>,
    pub kappa4: Vec<f64>,
}

/// `kappa3' = 3 mu1 a2 - a3`, `kappa4' = 6 mu2 a2 - a4 - 12 mu1^2 a2 + 4 mu1 a3`
/// with `a_n = n <g|C_{n-1}|g> lambda Edot`.
pub fn slow_cumulant_rates(problem: &MomentProblem, series: &MomentSeries) -> Result<SlowCumulants> {
    check_alignment(problem, series, 2)?;
    let fine = problem.fine();
    let kernels = problem.kernels();
    let n = series.len();
    let fine_moment = |order: usize| {
        on_fine(
            series.times(),
            &series.moments(order),
            &(0..n).map(|k| series.moment_rate_after(k, order)).collect::<Vec<_>>(),
            &(0..n).map(|k| series.moment_rate(k, order)).collect::<Vec<_>>(),
        )
    };
    let (mu1, mu2) = (fine_moment(1), fine_moment(2));
    let mut k3 = Vec::with_capacity(fine.len());
    let mut k4 = Vec::with_capacity(fine.len());
    for (i, &t) in fine.iter().enumerate() {
        let edot = if i + 1 == fine.len() { kernels.edot_left(i) } else { kernels.edot(i) };
        let scale = relaxation_time(problem.protocol().energy(t), problem.bath()) * edot;
        let a = |m: u32| m as f64 * kernels.source_moment(m - 1, i).gg * scale;
        let (a2, a3, a4) = (a(2), a(3), a(4));
        k3.push(3.0 * mu1[i] * a2 - a3);
        k4.push(6.0 * mu2[i] * a2 - a4 - 12.0 * mu1[i] * mu1[i] * a2 + 4.0 * mu1[i] * a3);
    }
    let nodes = |v: &[f64]| v.iter().step_by(2).copied().collect::<Vec<_>>();
    Ok(SlowCumulants {
        times: series.times().to_vec(),
        kappa3: nodes(&cumulative(fine, &k3)),
        kappa4: nodes(&cumulative(fine, &k4)),
        kappa3_rate: nodes(&k3),
        kappa4_rate: nodes(&k4),
    })
}

/// `-d ln(1 - xi)/dt` against `beta^2 abar lambda Edot^2` at the end of each runtime.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ConsistencyRow {
    pub tau: f64,
    pub lhs: f64,
    pub rhs: f64,
    /// `int gamma dt`: bath relaxation times elapsed.
    pub relaxations: f64,
    /// Set once at least ten of them have elapsed.
    pub in_regime: bool,
}

impl ConsistencyRow {
    pub fn ratio(&self) -> f64 {
        self.lhs / self.rhs
    }
}

pub fn xi_cumulant_consistency(
    ensemble: &EnsembleSpec,
    family: &dyn Fn(f64) -> model_core::Result<DriveProtocol>,
    bath: &BathSpec,
    taus: &[f64],
    settings: SolverSettings,
) -> Result<Vec<ConsistencyRow>> {
    let beta = bath.beta();
    taus.iter()
        .map(|&tau| {
            let problem = MomentProblem::new(ensemble, &family(tau)?, bath, settings)?;
            let xi = xi_from_ode(&problem)?;
            let k = xi.times().len() - 1;
            let i = problem.fine().len() - 1;
            let edot = problem.kernels().edot_left(i);
            let lambda = relaxation_time(problem.protocol().energy(tau), bath);
            let abar = problem.kernels().mean_coherence_weight(i);
            let decay = problem.kernels().decay();
            let relaxations = decay.hazard_down(i) - decay.hazard_up(i);
            Ok(ConsistencyRow {
                tau,
                lhs: xi.log_rate(k).expect("ode route provides rates"),
                rhs: beta * beta * abar * lambda * edot * edot,
                relaxations,
                in_regime: relaxations >= 10.0,
            })
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::one_sided_derivative;

    #[test]
    fn stencil_is_exact_for_quartics() {
        let xs = [0.1, 0.25, 0.3, 0.55, 0.6];
        let ys: Vec<f64> = xs.iter().map(|x: &f64| x.powi(4) - 2.0 * x).collect();
        let d = one_sided_derivative(&xs, &ys);
        assert!((d - (4.0 * 0.6f64.powi(3) - 2.0)).abs() < 1e-12);
    }
}
