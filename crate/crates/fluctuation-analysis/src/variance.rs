use model_core::rates;
use moment_ode::{MomentProblem, MomentSeries};

use crate::error::{FluctuationError, Result};
use crate::quadrature::{cumulative_sided, damped_cumulative_sided, hermite_mid};

/// `sigma^2(tau) = classical - coherent`, where `coherent` is the double
/// integral `2 int int Edot_t Edot_t' abar(t') e^{-int_t'^t gamma (2n+1)}`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct VarianceSplit {
    pub mean: f64,
    pub classical: f64,
    pub coherent: f64,
    pub total: f64,
}

/// Node values on the fine grid, midpoints filled by cubic Hermite
/// interpolation from the rate `after` each interval's start and the rate
/// `before` its end.
pub(crate) fn on_fine(times: &[f64], values: &[f64], after: &[f64], before: &[f64]) -> Vec<f64> {
    let mut out = Vec::with_capacity(2 * values.len() - 1);
    for k in 0..values.len() {
        out.push(values[k]);
        if k + 1 < values.len() {
            let h = times[k + 1] - times[k];
            out.push(hermite_mid(values[k], values[k + 1], after[k], before[k + 1], h));
        }
    }
    out
}

fn node_rates(series: &MomentSeries, rate: impl Fn(usize) -> f64) -> Vec<f64> {
    (0..series.len()).map(rate).collect()
}

pub(crate) fn check_alignment(problem: &MomentProblem, series: &MomentSeries, order: usize) -> Result<()> {
    if series.times() != problem.nodes() {
        return Err(FluctuationError::Precondition("moment series is on a different grid".into()));
    }
    if series.order() < order {
        return Err(FluctuationError::Precondition(format!("needs moments up to order {order}")));
    }
    Ok(())
}

/// The classical part integrates `y' = -gamma (2n+1) y + r_up mu_1 + Edot p_e`,
/// with `mu_1` and `p_e` taken from `series`; `sigma^2 = 2 int Edot y - mu_1^2`.
pub fn variance_closed_form(problem: &MomentProblem, series: &MomentSeries) -> Result<VarianceSplit> {
    check_alignment(problem, series, 1)?;
    let fine = problem.fine();
    let kernels = problem.kernels();
    let decay = kernels.decay();
    let mean = on_fine(
        series.times(),
        &series.moments(1),
        &node_rates(series, |k| series.moment_rate_after(k, 1)),
        &node_rates(series, |k| series.moment_rate(k, 1)),
    );
    let pe = on_fine(
        series.times(),
        &node_rates(series, |k| series.excited_population(k)),
        &node_rates(series, |k| series.matrix_rate_after(k, 0).row_sums()[0]),
        &node_rates(series, |k| series.matrix_rate(k, 0).row_sums()[0]),
    );
    let gamma: Vec<f64> = (0..fine.len()).map(|i| decay.hazard_down(i) + decay.hazard_up(i)).collect();
    let edot: Vec<f64> = (0..fine.len()).map(|i| kernels.edot(i)).collect();
    let edot_left: Vec<f64> = (0..fine.len()).map(|i| kernels.edot_left(i)).collect();
    let up: Vec<f64> = fine.iter().map(|&t| rates(problem.protocol().energy(t), problem.bath()).up).collect();
    let classical_source = |e: &[f64]| -> Vec<f64> { (0..fine.len()).map(|i| up[i] * mean[i] + e[i] * pe[i]).collect() };
    let coherent_source =
        |e: &[f64]| -> Vec<f64> { (0..fine.len()).map(|i| e[i] * kernels.mean_coherence_weight(i)).collect() };
    let damped = |source: &dyn Fn(&[f64]) -> Vec<f64>| {
        damped_cumulative_sided(fine, &gamma, &source(&edot), &source(&edot_left))
    };
    let outer = |y: Vec<f64>| {
        let f = |e: &[f64]| -> Vec<f64> { y.iter().zip(e).map(|(y, e)| 2.0 * y * e).collect() };
        *cumulative_sided(fine, &f(&edot), &f(&edot_left)).last().unwrap()
    };
    let mu1 = *mean.last().unwrap();
    let classical = outer(damped(&classical_source)) - mu1 * mu1;
    let coherent = outer(damped(&coherent_source));
    Ok(VarianceSplit {
        mean: mu1,
        classical,
        coherent,
        total: classical - coherent,
    })
}
