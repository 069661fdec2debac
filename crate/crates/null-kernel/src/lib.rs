//! Quantities attached to the segment of a trajectory before its first jump.
//!
//! Everything is tabulated once on a "fine" grid made of the solver nodes and
//! their midpoints, so that Runge-Kutta stages land on tabulated values.

mod decay;
mod sources;

pub use decay::{check_kernel_resolution, decay_kernels, DecayKernels};
pub use sources::{
    coherence_source_mgf, coherence_source_moment, coherence_weight, ensemble_coherence_weight,
    null_probability, null_work, NullKernels,
};

/// Logistic function `1 / (1 + e^{-x})`, saturating cleanly.
pub(crate) fn logistic(x: f64) -> f64 {
    if x >= 0.0 {
        1.0 / (1.0 + (-x).exp())
    } else {
        let e = x.exp();
        e / (1.0 + e)
    }
}
