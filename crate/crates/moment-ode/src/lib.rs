//! Deterministic work statistics from the matrix ODEs for the tilted
//! generating function `G(u, t)` and its Taylor coefficients `G_n(t)`.

mod cumulants;
mod error;
mod hierarchy;
mod mgf;
mod problem;
pub mod rk4;

pub use cumulants::cumulants_from_moments;
pub use error::{MomentError, Result};
pub use hierarchy::{solve_moment_hierarchy, MomentSeries};
pub use mgf::{solve_mgf, MgfSeries};
pub use problem::{MomentProblem, SolverSettings};

use model_core::{rates, TwoByTwo};

/// Transition-rate matrix `R` in the (e, g) basis; columns sum to zero.
pub fn rate_matrix(e: f64, bath: &model_core::BathSpec) -> TwoByTwo {
    let r = rates(e, bath);
    TwoByTwo::new(r.down, -r.up, -r.down, r.up)
}

/// `|e><e| M`: keeps the excited row.
pub(crate) fn project_excited(m: TwoByTwo) -> TwoByTwo {
    TwoByTwo::new(m.ee, m.eg, 0.0, 0.0)
}
