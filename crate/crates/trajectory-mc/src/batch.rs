use model_core::{BathSpec, DriveProtocol, EnsembleSpec};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::error::{McError, Result};
use crate::plan::StepPlan;
use crate::record::TrajectoryRecord;
use crate::sampler::Sampler;
use crate::stats::{MomentAccumulator, WorkStatistics};

/// Contiguous batches used for jackknife errors and parallel work.
pub const JACKKNIFE_GROUPS: u64 = 64;

/// Random stream of trajectory `index`: independent of scheduling.
pub fn stream_rng(seed: u64, index: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(index);
    rng
}

pub fn run_batch(
    ensemble: &EnsembleSpec,
    protocol: &DriveProtocol,
    bath: &BathSpec,
    dt: f64,
    n_traj: u64,
    seed: u64,
) -> Result<WorkStatistics> {
    let plan = StepPlan::new(protocol, bath, dt)?;
    run_batch_on_plan(ensemble, plan, n_traj, seed)
}

pub fn run_batch_on_plan(ensemble: &EnsembleSpec, plan: StepPlan, n_traj: u64, seed: u64) -> Result<WorkStatistics> {
    if n_traj == 0 {
        return Err(McError::Invalid("need at least one trajectory".into()));
    }
    let sampler = Sampler::new(ensemble, plan);
    let groups = JACKKNIFE_GROUPS.min(n_traj);
    let accs: Vec<MomentAccumulator> = (0..groups)
        .into_par_iter()
        .map(|g| {
            let mut acc = MomentAccumulator::default();
            for i in g * n_traj / groups..(g + 1) * n_traj / groups {
                acc.push(sampler.trajectory(seed, i).work);
            }
            acc
        })
        .collect();
    Ok(WorkStatistics::from_groups(&accs))
}

/// Full records for trajectories `first..first + count` of a batch.
pub fn sample_records(ensemble: &EnsembleSpec, plan: StepPlan, seed: u64, first: u64, count: u64) -> Vec<TrajectoryRecord> {
    let sampler = Sampler::new(ensemble, plan);
    (first..first + count).map(|i| sampler.trajectory(seed, i)).collect()
}
