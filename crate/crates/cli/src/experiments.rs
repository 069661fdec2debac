use fluctuation_analysis::{fdr_scan, xi_from_mgf, xi_routes};
use model_core::{DriveProtocol, ModelError};
use moment_ode::{solve_mgf, MomentProblem};
use oracle_enum::{enumerate_mgf, matrix_product_mgf, DiscreteModel};
use protocol_design::{baseline_cost, optimize_erasure_protocol};
use trajectory_mc::{sample_records, write_event_dump, StepPlan};

use crate::config::{Experiment, ExperimentConfig, Setup};
use crate::error::Result;
use crate::figures;
use crate::output::{Artifact, Table};
use crate::routes::{work_routes, StatsRow};

/// Validates `config` and runs it. Sweeps that fail part-way return the rows
/// computed so far with [`Artifact::partial`] set.
pub fn run(config: &ExperimentConfig) -> Result<Vec<Artifact>> {
    let setup = config.validate()?;
    match config.experiment {
        Experiment::Simulate => simulate(config, &setup),
        Experiment::Moments => moments(config, &setup),
        Experiment::Mgf => mgf(config, &setup),
        Experiment::Jarzynski => jarzynski(config, &setup),
        Experiment::Fdr => fdr(config, &setup),
        Experiment::OptimalProtocol => optimal_protocol(config, &setup),
        Experiment::Oracle => oracle(config, &setup),
        Experiment::Fig2 => figures::fig2(config, &setup),
        Experiment::Fig3 => figures::fig3(config, &setup),
        Experiment::Fig4 => figures::fig4(config, &setup),
    }
}

/// `-ln(Z_t / Z_0) / beta` with `Z = 1 + e^{-beta E}`.
pub(crate) fn free_energy_between(e0: f64, e1: f64, beta: f64) -> f64 {
    let log_z = |e: f64| (-beta * e).exp().ln_1p();
    -(log_z(e1) - log_z(e0)) / beta
}

pub(crate) fn as_model_error(e: crate::error::CliError) -> ModelError {
    ModelError::invalid("protocol", e.to_string())
}

fn simulate(config: &ExperimentConfig, s: &Setup) -> Result<Vec<Artifact>> {
    let w = trajectory_mc::run_batch(&s.ensemble, &s.protocol, &s.bath, s.dt, s.trajectories, s.seed)?;
    let mut t = Table::new([
        "trajectories", "dt", "mean", "variance", "kappa3", "kappa4", "se_mean", "se_variance", "se_kappa3",
    ]);
    t.push(vec![
        w.count as f64,
        s.dt,
        w.mean,
        w.variance(),
        w.cumulants[1],
        w.cumulants[2],
        w.se_mean,
        w.se_variance,
        w.se_third,
    ]);
    let mut out = vec![Artifact::complete("simulate.csv", t)];
    if config.events > 0 {
        let plan = StepPlan::new(&s.protocol, &s.bath, s.dt)?;
        let records = sample_records(&s.ensemble, plan, s.seed, 0, config.events);
        let mut buf = Vec::new();
        write_event_dump(&records, &mut buf)?;
        out.push(Artifact::text("events.csv", String::from_utf8(buf).expect("csv is utf-8")));
    }
    Ok(out)
}

fn moments(config: &ExperimentConfig, s: &Setup) -> Result<Vec<Artifact>> {
    let rows = work_routes().get(&config.route)?.statistics(s)?;
    let mut t = Table::new(StatsRow::COLUMNS);
    for r in rows {
        t.push(r.values());
    }
    Ok(vec![Artifact::complete("moments.csv", t)])
}

fn mgf(config: &ExperimentConfig, s: &Setup) -> Result<Vec<Artifact>> {
    let g = solve_mgf(&s.ensemble, &s.protocol, &s.bath, &config.u, s.settings)?;
    let mut t = Table::new(std::iter::once("t".to_string()).chain(config.u.iter().map(|u| format!("G(u={u:?})"))));
    for k in 0..g.len() {
        let mut row = vec![g.times()[k]];
        row.extend((0..config.u.len()).map(|j| g.value(k, j)));
        t.push(row);
    }
    Ok(vec![Artifact::complete("mgf.csv", t)])
}

fn jarzynski(config: &ExperimentConfig, s: &Setup) -> Result<Vec<Artifact>> {
    let beta = s.bath.beta();
    let problem = MomentProblem::new(&s.ensemble, &s.protocol, &s.bath, s.settings)?;
    let series = problem.hierarchy(1)?;
    let g = problem.mgf(&[beta])?;
    let xi = match config.xi_route.as_str() {
        // Reuse the series just solved rather than solving it again.
        "mgf-ansatz" => xi_from_mgf(&g, &problem)?,
        name => xi_routes().get(name)?.compute(&problem)?,
    };
    let bound = xi.bound()?;
    let e0 = s.protocol.energy(0.0);
    let mut t = Table::new(["t", "mean", "delta_f", "w_diss", "G_beta", "jarzynski_ratio", "xi", "bound", "bound_capped"]);
    for k in 0..series.len() {
        let time = series.times()[k];
        let df = free_energy_between(e0, s.protocol.energy(time), beta);
        let gb = g.value(k, 0);
        t.push(vec![
            time,
            series.moment(k, 1),
            df,
            series.moment(k, 1) - df,
            gb,
            fluctuation_analysis::jarzynski_ratio(gb, df, beta),
            xi.xi()[k],
            bound.values[k],
            f64::from(u8::from(1.0 - xi.xi()[k] < fluctuation_analysis::BOUND_CAP_GAP)),
        ]);
    }
    Ok(vec![Artifact::complete("jarzynski.csv", t)])
}

fn fdr(config: &ExperimentConfig, s: &Setup) -> Result<Vec<Artifact>> {
    let taus = if config.taus.is_empty() { vec![10.0, 30.0, 100.0] } else { config.taus.clone() };
    let family = |tau: f64| config.protocol_with_tau(tau).map_err(as_model_error);
    let report = fdr_scan(&s.ensemble, &family, &s.bath, &taus, s.settings)?;
    Ok(vec![Artifact::complete("fdr.csv", fdr_table(&report.rows))])
}

pub(crate) fn fdr_table(rows: &[fluctuation_analysis::FdrRow]) -> Table {
    let mut t = Table::new([
        "tau", "sigma2_rate", "sigma2_rate_stencil", "wdiss_rate", "d_cl", "prediction", "ratio", "lambda", "abar", "edot",
    ]);
    for r in rows {
        t.push(vec![
            r.tau,
            r.sigma2_rate,
            r.sigma2_rate_stencil,
            r.wdiss_rate,
            r.d_cl,
            r.prediction,
            r.ratio(),
            r.lambda,
            r.abar,
            r.edot,
        ]);
    }
    t
}

fn optimal_protocol(config: &ExperimentConfig, s: &Setup) -> Result<Vec<Artifact>> {
    let spec = config.erasure_spec(s.protocol.tau(), s.bath)?;
    let out = optimize_erasure_protocol(&spec)?;
    let mut summary = Table::new(["tau", "cost", "baseline_cost", "p_start", "p_end", "iterations"]);
    summary.push(vec![
        spec.tau(),
        out.cost,
        baseline_cost(&spec)?,
        spec.p_start(),
        spec.p_end(),
        out.iterations as f64,
    ]);
    Ok(vec![
        Artifact::complete("erasure.csv", summary),
        Artifact::complete("protocol.csv", knot_table(&out.protocol)),
    ])
}

/// `(t, E)` knots of a piecewise protocol, readable by `read_knots`.
pub(crate) fn knot_table(p: &DriveProtocol) -> Table {
    let mut t = Table::new(["t", "E"]);
    for pair in p.params().chunks(2) {
        t.push(pair.to_vec());
    }
    t
}

fn oracle(config: &ExperimentConfig, s: &Setup) -> Result<Vec<Artifact>> {
    let model = DiscreteModel::from_protocol(&s.protocol, &s.bath, s.oracle_steps)?;
    let mut t = Table::new(["u", "enumerated", "matrix_product", "abs_difference"]);
    for &u in &config.u {
        let a = enumerate_mgf(&s.ensemble, &model, u)?;
        let b = matrix_product_mgf(&s.ensemble, &model, u)?;
        t.push(vec![u, a, b, (a - b).abs()]);
    }
    Ok(vec![Artifact::complete("oracle.csv", t)])
}

