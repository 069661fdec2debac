use model_core::EnsembleSpec;

use crate::error::Result;
use crate::model::DiscreteModel;

/// `sum_paths P[path] e^{-u W[path]}` over every outcome sequence.
///
/// Each member contributes its null run of length `k`, then either no jump
/// (`k = N`) or a first jump in step `k` followed by every eigenstate path
/// through the remaining steps.
pub fn enumerate_mgf(ensemble: &EnsembleSpec, model: &DiscreteModel, u: f64) -> Result<f64> {
    let n = model.steps();
    let mut total = 0.0;
    for prep in ensemble.resolve() {
        let mut p = prep.p_e();
        let mut survive = 1.0;
        let mut work = 0.0;
        let mut sum = 0.0;
        for k in 0..=n {
            if k == n {
                sum += survive * (-u * work).exp();
                break;
            }
            let (qd, qu) = (model.q_down(k), model.q_up(k));
            let de = model.gap_change(k);
            let down = survive * p * qd;
            if down > 0.0 {
                sum += down * (-u * work).exp() * eigen_paths(model, k + 1, false, u);
            }
            let up = survive * (1.0 - p) * qu;
            if up > 0.0 {
                sum += up * (-u * (work + de)).exp() * eigen_paths(model, k + 1, true, u);
            }
            let stay_e = p * (1.0 - qd);
            let stay = stay_e + (1.0 - p) * (1.0 - qu);
            if stay == 0.0 {
                break;
            }
            p = stay_e / stay;
            survive *= stay;
            work += p * de;
        }
        total += prep.weight() * sum;
    }
    Ok(total)
}

/// Sum over all two-state paths from step `from` to the end, starting in `excited`.
fn eigen_paths(model: &DiscreteModel, from: usize, excited: bool, u: f64) -> f64 {
    if from == model.steps() {
        return 1.0;
    }
    let de = model.gap_change(from);
    let q = if excited { model.q_down(from) } else { model.q_up(from) };
    let tilt = |e: bool| if e { (-u * de).exp() } else { 1.0 };
    let mut s = (1.0 - q) * tilt(excited) * eigen_paths(model, from + 1, excited, u);
    if q > 0.0 {
        s += q * tilt(!excited) * eigen_paths(model, from + 1, !excited, u);
    }
    s
}
