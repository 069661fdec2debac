use fluctuation_analysis::{fdr_scan, xi_cumulant_consistency, xi_routes};
use model_core::{BathSpec, Coupling, DriveProtocol, EnsembleSpec};
use moment_ode::MomentProblem;
use protocol_design::{builtin_protocol, optimize_erasure_protocol};
use rayon::prelude::*;
use trajectory_mc::default_dt;

use crate::config::{ExperimentConfig, Setup};
use crate::error::Result;
use crate::experiments::free_energy_between;
use crate::output::{Artifact, Table};

/// Runs `f` on every point in parallel and keeps results in input order up
/// to the first failure, whose message is returned alongside.
fn sweep<T: Send>(points: &[f64], f: impl Fn(usize, f64) -> Result<T> + Sync) -> (Vec<T>, Option<String>) {
    let results: Vec<Result<T>> = points.par_iter().enumerate().map(|(i, &x)| f(i, x)).collect();
    let mut out = Vec::with_capacity(results.len());
    for (r, &x) in results.into_iter().zip(points) {
        match r {
            Ok(v) => out.push(v),
            Err(e) => return (out, Some(format!("stopped at tau = {x:?}: {e}"))),
        }
    }
    (out, None)
}

fn artifact(file: &str, table: Table, partial: &Option<String>) -> Artifact {
    Artifact {
        partial: partial.clone(),
        ..Artifact::complete(file, table)
    }
}

/// The three decompositions of the maximally mixed state, in column order.
fn fig2_ensembles(quad_nodes: usize) -> Result<[(&'static str, EnsembleSpec); 3]> {
    Ok([
        ("D_EG", EnsembleSpec::eigenstates()),
        ("D_PM", EnsembleSpec::plus_minus()),
        ("D_Haar", EnsembleSpec::haar(quad_nodes)?),
    ])
}

/// Per ensemble: hierarchy (mean, stdev, kappa3) and MC values with errors.
struct Fig2Point {
    tau: f64,
    theory: [[f64; 3]; 3],
    mc: [[(f64, f64); 3]; 3],
}

fn fig2_point(config: &ExperimentConfig, s: &Setup, protocol: &DriveProtocol, index: usize) -> Result<Fig2Point> {
    let mut theory = [[0.0; 3]; 3];
    let mut mc = [[(0.0, 0.0); 3]; 3];
    let tau = protocol.tau();
    let dt = config.solver.dt.unwrap_or_else(|| default_dt(tau));
    for (e, (_, ensemble)) in fig2_ensembles(config.solver.quad_nodes)?.iter().enumerate() {
        let series = MomentProblem::new(ensemble, protocol, &s.bath, s.settings)?.hierarchy(3)?;
        let c = series.cumulants(series.last());
        theory[e] = [c[0], c[1].max(0.0).sqrt(), c[2]];
        let seed = s.seed.wrapping_add((3 * index + e) as u64);
        let w = trajectory_mc::run_batch(ensemble, protocol, &s.bath, dt, s.trajectories, seed)?;
        let sd = w.variance().max(0.0).sqrt();
        let se_sd = if sd > 0.0 { w.se_variance / (2.0 * sd) } else { 0.0 };
        mc[e] = [(w.mean, w.se_mean), (sd, se_sd), (w.central[1], w.se_third)];
    }
    Ok(Fig2Point { tau, theory, mc })
}

fn fig2_tables(points: &[Fig2Point]) -> [Table; 3] {
    let columns = [
        "tau", "D_EG", "D_PM", "D_Haar", "MC_EG", "MC_EG_se", "MC_PM", "MC_PM_se", "MC_Haar", "MC_Haar_se",
    ];
    let mut tables = [Table::new(columns), Table::new(columns), Table::new(columns)];
    for p in points {
        for (q, table) in tables.iter_mut().enumerate() {
            let mut row = vec![p.tau];
            row.extend((0..3).map(|e| p.theory[e][q]));
            for e in 0..3 {
                row.extend([p.mc[e][q].0, p.mc[e][q].1]);
            }
            table.push(row);
        }
    }
    tables
}

pub const FIG2_LINEAR_TAUS: [f64; 10] = [1.0, 2.0, 3.0, 4.0, 5.0, 6.0, 7.0, 8.0, 9.0, 10.0];
pub const FIG2_OPTIMAL_TAUS: [f64; 6] = [45.0, 60.0, 80.0, 100.0, 150.0, 200.0];

/// Mean, standard deviation and third cumulant against runtime for the
/// optimal erasure protocol and for `E = t/2`, with Monte Carlo points.
pub fn fig2(config: &ExperimentConfig, s: &Setup) -> Result<Vec<Artifact>> {
    let linear_taus = if config.taus.is_empty() { FIG2_LINEAR_TAUS.to_vec() } else { config.taus.clone() };
    let (linear, linear_err) = sweep(&linear_taus, |i, tau| {
        let p = builtin_protocol("linear", &[0.5], tau)?;
        fig2_point(config, s, &p, i)
    });
    let offset = linear_taus.len();
    let (optimal, optimal_err) = sweep(&FIG2_OPTIMAL_TAUS, |i, tau| {
        let spec = config.erasure_spec(tau, s.bath)?;
        let p = optimize_erasure_protocol(&spec)?.protocol;
        fig2_point(config, s, &p, offset + i)
    });
    let mut out = Vec::new();
    for (kind, points, err) in [("optimal", &optimal, &optimal_err), ("linear", &linear, &linear_err)] {
        let [mean, sd, k3] = fig2_tables(points);
        out.push(artifact(&format!("mean_{kind}.csv"), mean, err));
        out.push(artifact(&format!("stdev_{kind}.csv"), sd, err));
        out.push(artifact(&format!("skewness_{kind}.csv"), k3, err));
    }
    Ok(out)
}

pub const FIG3_TAUS: [f64; 9] = [0.5, 1.0, 2.0, 3.0, 4.0, 5.0, 6.0, 8.0, 10.0];

/// `E = t`, `t^{1/2}`, `t^{1/3}`, `tanh(2t)` as (file stem, registry name, parameters).
pub const FIG3_PROTOCOLS: [(&str, &str, &[f64]); 4] = [
    ("linear", "linear", &[1.0]),
    ("sqrt", "power", &[1.0, 0.5]),
    ("cbrt", "power", &[1.0, 1.0 / 3.0]),
    ("tanh", "tanh", &[2.0]),
];

/// Dissipated work and the Jensen bounds of two coherent decompositions.
pub fn fig3(config: &ExperimentConfig, s: &Setup) -> Result<Vec<Artifact>> {
    let taus = if config.taus.is_empty() { FIG3_TAUS.to_vec() } else { config.taus.clone() };
    let routes = xi_routes();
    let route = routes.get(&config.xi_route)?;
    let polar = EnsembleSpec::polar_pair(0.25)?;
    let pm = EnsembleSpec::plus_minus();
    let beta = s.bath.beta();
    let mut out = Vec::new();
    for (stem, name, params) in FIG3_PROTOCOLS {
        let (rows, err) = sweep(&taus, |_, tau| {
            let p = builtin_protocol(name, params, tau)?;
            let bound = |e: &EnsembleSpec| -> Result<(f64, f64)> {
                let problem = MomentProblem::new(e, &p, &s.bath, s.settings)?;
                let mean = problem.hierarchy(1)?;
                let b = route.compute(&problem)?.bound()?.final_value();
                Ok((mean.moment(mean.last(), 1), b))
            };
            let (mean, b_pm) = bound(&pm)?;
            let (_, b_polar) = bound(&polar)?;
            let w_diss = mean - free_energy_between(p.energy(0.0), p.energy(tau), beta);
            Ok(vec![tau, w_diss, b_pm, b_polar])
        });
        let mut t = Table::new(["tau", "W_diss", "bound_PM", "bound_polar"]);
        rows.into_iter().for_each(|r| t.push(r));
        out.push(artifact(&format!("fig3_{stem}.csv"), t, &err));
    }
    Ok(out)
}

pub const FIG4A_TAUS: [f64; 7] = [5.0, 10.0, 20.0, 30.0, 50.0, 70.0, 100.0];
pub const FIG4BC_TAUS: [f64; 5] = [10.0, 20.0, 50.0, 100.0, 200.0];

fn with_coupling(bath: &BathSpec, coupling: Coupling) -> Result<BathSpec> {
    Ok(BathSpec::new(bath.beta(), coupling, bath.gap_floor())?)
}

/// FDR deviation for `E = t/tau` with Ohmic and constant coupling, and the
/// ξ rate against its slow-driving estimate for `0.1 t` and `0.1 t^{1/3}`.
pub fn fig4(config: &ExperimentConfig, s: &Setup) -> Result<Vec<Artifact>> {
    let a_taus = if config.taus.is_empty() { FIG4A_TAUS.to_vec() } else { config.taus.clone() };
    let bc_taus = if config.taus.is_empty() { FIG4BC_TAUS.to_vec() } else { config.taus.clone() };
    let ramp = |tau: f64| builtin_protocol("ramp", &[1.0], tau);
    let mut out = Vec::new();
    for (stem, coupling) in [
        ("fig4a_ohmic", Coupling::Ohmic { kappa: 0.1 }),
        ("fig4a_constant", Coupling::Constant { gamma0: 0.1 }),
    ] {
        let bath = with_coupling(&s.bath, coupling)?;
        let (rows, err) = sweep(&a_taus, |_, tau| {
            let eg = fdr_scan(&EnsembleSpec::eigenstates(), &ramp, &bath, &[tau], s.settings)?.rows[0];
            let pm = fdr_scan(&EnsembleSpec::plus_minus(), &ramp, &bath, &[tau], s.settings)?.rows[0];
            Ok(vec![tau, eg.d_cl, pm.d_cl, pm.prediction, pm.ratio()])
        });
        let mut t = Table::new(["tau", "d_cl_EG", "d_cl_PM", "prediction_PM", "ratio_PM"]);
        rows.into_iter().for_each(|r| t.push(r));
        out.push(artifact(&format!("{stem}.csv"), t, &err));
    }
    for (stem, name, params) in [("fig4b_linear", "linear", &[0.1][..]), ("fig4c_cbrt", "power", &[0.1, 1.0 / 3.0][..])] {
        let family = |tau: f64| builtin_protocol(name, params, tau);
        let (rows, err) = sweep(&bc_taus, |_, tau| {
            let r = xi_cumulant_consistency(&EnsembleSpec::plus_minus(), &family, &s.bath, &[tau], s.settings)?[0];
            Ok(vec![tau, r.lhs, r.rhs, r.ratio(), r.relaxations, f64::from(u8::from(r.in_regime))])
        });
        let mut t = Table::new(["tau", "xi_log_rate", "prediction", "ratio", "relaxations", "in_regime"]);
        rows.into_iter().for_each(|r| t.push(r));
        out.push(artifact(&format!("{stem}.csv"), t, &err));
    }
    Ok(out)
}
