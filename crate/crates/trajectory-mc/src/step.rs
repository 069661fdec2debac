use model_core::{BathSpec, DriveProtocol};
use rand::Rng;

use crate::error::{McError, Result};
use crate::plan::{step_hazards, MAX_STEP_HAZARD};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum StepEvent {
    Null,
    ToGround,
    ToExcited,
}

/// State and increments after one step.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StepOutcome {
    pub p_e: f64,
    pub event: StepEvent,
    pub work: f64,
    pub heat: f64,
}

/// One Kraus step at frozen gap `e0` followed by the gap change to `e1`.
/// Jumps occur with probabilities `p_e (1 - e^{-h_down})` and `p_g (1 - e^{-h_up})`.
pub(crate) fn kraus_step(p_e: f64, e0: f64, e1: f64, h_down: f64, h_up: f64, u: f64) -> StepOutcome {
    let down = p_e * -(-h_down).exp_m1();
    let up = (1.0 - p_e) * -(-h_up).exp_m1();
    let (p, event) = if u < down {
        (0.0, StepEvent::ToGround)
    } else if u < down + up {
        (1.0, StepEvent::ToExcited)
    } else {
        let a = p_e * (-h_down).exp();
        let b = (1.0 - p_e) * (-h_up).exp();
        (a / (a + b), StepEvent::Null)
    };
    StepOutcome {
        p_e: p,
        event,
        work: p * (e1 - e0),
        heat: e0 * (p - p_e),
    }
}

/// Advances a pure state with excited population `p_e` from `t` to `t + dt`.
pub fn step<R: Rng + ?Sized>(
    p_e: f64,
    t: f64,
    dt: f64,
    protocol: &DriveProtocol,
    bath: &BathSpec,
    rng: &mut R,
) -> Result<StepOutcome> {
    let h = step_hazards(protocol, bath, t, t + dt);
    let hazard = h.down * p_e + h.up * (1.0 - p_e);
    if hazard >= MAX_STEP_HAZARD || !hazard.is_finite() {
        return Err(McError::StepTooLarge { t, hazard });
    }
    let u: f64 = rng.gen();
    Ok(kraus_step(p_e, protocol.energy(t), protocol.energy(t + dt), h.down, h.up, u))
}
