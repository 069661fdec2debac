//! Quantum-jump trajectories of the driven qubit under the stroboscopic Kraus
//! map, with operational work and heat along each trajectory.
//!
//! A trajectory advances on a [`StepPlan`]: at each step boundary the Kraus
//! map acts at frozen gap (jump or null update, heat), then the gap moves with
//! the population held fixed (work). [`Sampler`] draws trajectories of that
//! process event by event instead of step by step.

mod batch;
mod dump;
mod error;
mod plan;
mod record;
mod sampler;
mod stats;
mod step;

pub use batch::{run_batch, run_batch_on_plan, sample_records, stream_rng, JACKKNIFE_GROUPS};
pub use dump::write_event_dump;
pub use error::{McError, Result};
pub use plan::{default_dt, step_hazards, StepHazards, StepPlan, MAX_STEP_HAZARD};
pub use record::{FinalState, Jump, JumpDirection, TrajectoryRecord};
pub use sampler::{simulate_stepwise, simulate_trajectory, Sampler};
pub use stats::{MomentAccumulator, WorkStatistics};
pub use step::{step, StepEvent, StepOutcome};
