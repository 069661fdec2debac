use model_core::EnsembleSpec;

use crate::error::Result;
use crate::model::DiscreteModel;

/// Backward row vectors `v_n = (v_n(e), v_n(g))` of the tilted transfer matrices:
/// `v_n = sum_{s'} T_n(s -> s') e^{-u [s' = e] dE_n} v_{n+1}(s')`, with `v_N = (1, 1)`.
fn backward(model: &DiscreteModel, u: f64) -> Vec<[f64; 2]> {
    let n = model.steps();
    let mut v = vec![[1.0, 1.0]; n + 1];
    for k in (0..n).rev() {
        let tilt = (-u * model.gap_change(k)).exp();
        let (qd, qu) = (model.q_down(k), model.q_up(k));
        let [ve, vg] = v[k + 1];
        v[k] = [(1.0 - qd) * tilt * ve + qd * vg, qu * tilt * ve + (1.0 - qu) * vg];
    }
    v
}

/// MGF of the pure jump process started in an eigenstate.
pub fn classical_mgf(model: &DiscreteModel, excited: bool, u: f64) -> f64 {
    let v = backward(model, u)[0];
    if excited {
        v[0]
    } else {
        v[1]
    }
}

/// Same value as [`crate::enumerate_mgf`], from the null segment in closed form
/// stitched onto the backward products.
pub fn matrix_product_mgf(ensemble: &EnsembleSpec, model: &DiscreteModel, u: f64) -> Result<f64> {
    let n = model.steps();
    let v = backward(model, u);
    let mut total = 0.0;
    for prep in ensemble.resolve() {
        let (pe, pg) = (prep.p_e(), prep.p_g());
        if prep.is_eigenstate() {
            total += prep.weight() * if pe == 1.0 { v[0][0] } else { v[0][1] };
            continue;
        }
        // Unnormalised null populations a = p_e prod(1 - q_down), b = p_g prod(1 - q_up).
        let (mut a, mut b) = (pe, pg);
        let mut work = 0.0;
        let mut sum = 0.0;
        for k in 0..n {
            let (qd, qu) = (model.q_down(k), model.q_up(k));
            let de = model.gap_change(k);
            let weight = (-u * work).exp();
            sum += weight * (a * qd * v[k + 1][1] + b * qu * (-u * de).exp() * v[k + 1][0]);
            a *= 1.0 - qd;
            b *= 1.0 - qu;
            if a + b == 0.0 {
                break;
            }
            work += a / (a + b) * de;
        }
        sum += (a + b) * (-u * work).exp();
        total += prep.weight() * sum;
    }
    Ok(total)
}
