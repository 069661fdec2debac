use model_core::{EnsembleSpec, PurePrep};
use rand::Rng;
use rand_chacha::ChaCha8Rng;

use crate::batch::stream_rng;
use crate::error::Result;
use crate::plan::{logistic, StepPlan};
use crate::record::{FinalState, Jump, JumpDirection, TrajectoryRecord};
use crate::step::{step, StepEvent};

fn log_add_exp(a: f64, b: f64) -> f64 {
    let (hi, lo) = if a > b { (a, b) } else { (b, a) };
    if hi == f64::NEG_INFINITY {
        hi
    } else {
        hi + (lo - hi).exp().ln_1p()
    }
}

/// Uniform variate in `(0, 1]`.
fn open_uniform(rng: &mut ChaCha8Rng) -> f64 {
    1.0 - rng.gen::<f64>()
}

/// Running work and heat of the null segment of one superposition, per step count.
#[derive(Debug, Clone)]
struct NullTable {
    work: Vec<f64>,
    heat: Vec<f64>,
}

/// Draws trajectories of the stepwise Kraus process event by event.
///
/// Before its first jump a superposition evolves deterministically, so the
/// first-jump step is found by inverting the no-jump probability
/// `p e^{-H_down} + (1 - p) e^{-H_up}`; afterwards the state is an eigenstate
/// and each jump step is found from an exponential clock on the prefix hazards.
/// Both are exact in distribution for the step process.
#[derive(Debug, Clone)]
pub struct Sampler {
    plan: StepPlan,
    ensemble: EnsembleSpec,
    tables: Vec<Option<NullTable>>,
}

impl Sampler {
    pub fn new(ensemble: &EnsembleSpec, plan: StepPlan) -> Self {
        let tables = match ensemble {
            EnsembleSpec::Discrete { preps, .. } => preps
                .iter()
                .map(|p| (!p.is_eigenstate()).then(|| null_table(&plan, p.p_e())))
                .collect(),
            EnsembleSpec::Continuous { .. } => Vec::new(),
        };
        Sampler {
            plan,
            ensemble: ensemble.clone(),
            tables,
        }
    }

    pub fn plan(&self) -> &StepPlan {
        &self.plan
    }

    /// Trajectory number `index` of the batch seeded by `seed`.
    pub fn trajectory(&self, seed: u64, index: u64) -> TrajectoryRecord {
        let mut rng = stream_rng(seed, index);
        let u: f64 = rng.gen();
        let (prep_index, p_e) = match &self.ensemble {
            EnsembleSpec::Discrete { preps, .. } => {
                let mut acc = 0.0;
                let mut chosen = preps.len() - 1;
                for (i, p) in preps.iter().enumerate() {
                    acc += p.weight();
                    if u < acc {
                        chosen = i;
                        break;
                    }
                }
                (Some(chosen), preps[chosen].p_e())
            }
            EnsembleSpec::Continuous { .. } => (None, self.ensemble.sample_p_e(u)),
        };
        let table = prep_index.and_then(|i| self.tables[i].as_ref());
        let mut rec = run(&self.plan, p_e, table, &mut rng);
        rec.prep_index = prep_index;
        rec.seed = seed;
        rec.stream = index;
        rec
    }
}

fn null_table(plan: &StepPlan, p: f64) -> NullTable {
    let n = plan.steps();
    let odds = p.ln() - (1.0 - p).ln();
    let mut work = Vec::with_capacity(n + 1);
    let mut heat = Vec::with_capacity(n + 1);
    let (mut w, mut q) = (0.0, 0.0);
    work.push(0.0);
    heat.push(0.0);
    let mut before = p;
    for k in 0..n {
        let after = logistic(odds - plan.cumulative_gamma(k + 1));
        q += plan.energy(k) * (after - before);
        w += after * (plan.energy(k + 1) - plan.energy(k));
        work.push(w);
        heat.push(q);
        before = after;
    }
    NullTable { work, heat }
}

fn null_segment(plan: &StepPlan, p: f64, steps: usize, table: Option<&NullTable>) -> (f64, f64) {
    if let Some(t) = table {
        return (t.work[steps], t.heat[steps]);
    }
    let odds = p.ln() - (1.0 - p).ln();
    let (mut w, mut q) = (0.0, 0.0);
    let mut before = p;
    for k in 0..steps {
        let after = logistic(odds - plan.cumulative_gamma(k + 1));
        q += plan.energy(k) * (after - before);
        w += after * (plan.energy(k + 1) - plan.energy(k));
        before = after;
    }
    (w, q)
}

/// Smallest `k` in `lo..=hi` with `pred(k)` false, assuming `pred` holds on a prefix; `hi + 1` if none.
fn first_false(lo: usize, hi: usize, pred: impl Fn(usize) -> bool) -> usize {
    let (mut a, mut b) = (lo, hi + 1);
    while a < b {
        let m = a + (b - a) / 2;
        if pred(m) {
            a = m + 1;
        } else {
            b = m;
        }
    }
    a
}

fn run(plan: &StepPlan, p_e: f64, table: Option<&NullTable>, rng: &mut ChaCha8Rng) -> TrajectoryRecord {
    let n = plan.steps();
    let mut rec = TrajectoryRecord {
        prep_index: None,
        p_e,
        jumps: Vec::new(),
        work: 0.0,
        heat: 0.0,
        final_state: FinalState::Superposition(p_e),
        seed: 0,
        stream: 0,
    };
    let mut excited;
    let mut start;
    if p_e == 0.0 || p_e == 1.0 {
        excited = p_e == 1.0;
        start = 0;
    } else {
        let ln_u = open_uniform(rng).ln();
        let (lp, lq) = (p_e.ln(), (1.0 - p_e).ln());
        let ln_null = |k: usize| log_add_exp(lp - plan.cumulative_down(k), lq - plan.cumulative_up(k));
        // Jump during step m iff ln P_null(m + 1) < ln u <= ln P_null(m).
        let m = first_false(1, n, |k| ln_null(k) >= ln_u) - 1;
        let (w, q) = null_segment(plan, p_e, m.min(n), table);
        rec.work = w;
        rec.heat = q;
        if m >= n {
            let odds = lp - lq;
            rec.final_state = FinalState::Superposition(logistic(odds - plan.cumulative_gamma(n)));
            return rec;
        }
        let p_m = logistic(lp - lq - plan.cumulative_gamma(m));
        let down = p_m * -(-plan.hazard_down(m)).exp_m1();
        let up = (1.0 - p_m) * -(-plan.hazard_up(m)).exp_m1();
        let u: f64 = rng.gen();
        excited = u * (down + up) >= down;
        let e = plan.energy(m);
        rec.heat += if excited { e * (1.0 - p_m) } else { -e * p_m };
        record_jump(&mut rec, plan, m, excited);
        start = m + 1;
    }
    loop {
        let cum = if excited { plan.cum_down() } else { plan.cum_up() };
        let clock = -open_uniform(rng).ln() + cum[start];
        // Jump during step m iff cum[m + 1] > clock >= cum[m].
        let m = first_false(start + 1, n, |k| cum[k] <= clock) - 1;
        let stop = m.min(n);
        if excited {
            rec.work += plan.energy(stop) - plan.energy(start);
        }
        if m >= n {
            break;
        }
        let e = plan.energy(m);
        excited = !excited;
        rec.heat += if excited { e } else { -e };
        record_jump(&mut rec, plan, m, excited);
        start = m + 1;
    }
    rec.final_state = if excited { FinalState::Excited } else { FinalState::Ground };
    rec
}

/// Logs a jump at step `m` and adds the work of the rest of that step.
fn record_jump(rec: &mut TrajectoryRecord, plan: &StepPlan, m: usize, excited: bool) {
    rec.jumps.push(Jump {
        t: plan.times()[m],
        direction: if excited { JumpDirection::ToExcited } else { JumpDirection::ToGround },
        work: rec.work,
        heat: rec.heat,
    });
    if excited {
        rec.work += plan.energy(m + 1) - plan.energy(m);
    }
}

/// One trajectory from a fixed preparation, on stream 0 of `seed`.
pub fn simulate_trajectory(prep: &PurePrep, plan: &StepPlan, seed: u64) -> TrajectoryRecord {
    let mut rng = stream_rng(seed, 0);
    let mut rec = run(plan, prep.p_e(), None, &mut rng);
    rec.seed = seed;
    rec
}

/// The same process advanced one [`step`] at a time.
pub fn simulate_stepwise(prep: &PurePrep, plan: &StepPlan, seed: u64) -> Result<TrajectoryRecord> {
    let mut rng = stream_rng(seed, 0);
    let times = plan.times();
    let mut p = prep.p_e();
    let mut rec = TrajectoryRecord {
        prep_index: None,
        p_e: p,
        jumps: Vec::new(),
        work: 0.0,
        heat: 0.0,
        final_state: FinalState::Superposition(p),
        seed,
        stream: 0,
    };
    for k in 0..plan.steps() {
        let dt = times[k + 1] - times[k];
        let o = step(p, times[k], dt, plan.protocol(), plan.bath(), &mut rng)?;
        let w_before = rec.work;
        rec.heat += o.heat;
        rec.work += o.work;
        if o.event != StepEvent::Null {
            rec.jumps.push(Jump {
                t: times[k],
                direction: if o.event == StepEvent::ToExcited {
                    JumpDirection::ToExcited
                } else {
                    JumpDirection::ToGround
                },
                work: w_before,
                heat: rec.heat,
            });
        }
        p = o.p_e;
    }
    rec.final_state = if rec.jumps.is_empty() && p != 0.0 && p != 1.0 {
        FinalState::Superposition(p)
    } else if p == 1.0 {
        FinalState::Excited
    } else {
        FinalState::Ground
    };
    Ok(rec)
}
