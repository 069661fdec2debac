//! Post-processing of the deterministic work statistics: dissipated work,
//! the Jarzynski deviation `xi`, the variance split and slow-driving relations.

mod error;
mod fdr;
mod quadrature;
mod variance;
mod xi;

pub use error::{FluctuationError, Result};
pub use fdr::{
    fdr_scan, slow_cumulant_rates, xi_cumulant_consistency, ConsistencyRow, FdrReport, FdrRow,
    SlowCumulants,
};
pub use variance::{variance_closed_form, VarianceSplit};
pub use xi::{
    jensen_bound, phi_alpha, xi_formal_solution, xi_from_mgf, xi_from_ode, xi_routes, BoundSeries,
    PhiAlpha, XiResult, XiRoute, BOUND_CAP_GAP,
};

/// `W_diss = <W> - dF`.
pub fn dissipated_work(mean_work: f64, delta_f: f64) -> f64 {
    mean_work - delta_f
}

/// `<e^{-beta (W - dF)}>` from `G(beta)`; at most one for any ensemble started in equilibrium.
pub fn jarzynski_ratio(g_at_beta: f64, delta_f: f64, beta: f64) -> f64 {
    g_at_beta * (beta * delta_f).exp()
}
