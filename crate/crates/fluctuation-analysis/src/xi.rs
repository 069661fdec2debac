use model_core::{equilibrium_population, rates, Registry};
use moment_ode::rk4::{integrate, OdeSystem, Stage};
use moment_ode::{MgfSeries, MomentProblem};

use crate::error::{FluctuationError, Result};
use crate::quadrature::{cumulative_sided, damped_cumulative_sided};

/// Closest approach of `xi` to one before the Jensen bound is capped.
pub const BOUND_CAP_GAP: f64 = 1e-12;

/// `xi(t)` on the solver nodes, defined by `G(beta, t) = (1 - xi) e^{-beta dF(t)}`.
#[derive(Debug, Clone, PartialEq)]
pub struct XiResult {
    route: String,
    beta: f64,
    times: Vec<f64>,
    xi: Vec<f64>,
    rate: Option<Vec<f64>>,
}

impl XiResult {
    /// Checks `xi >= -1e-8` and `xi < 1`.
    pub fn new(
        route: impl Into<String>,
        beta: f64,
        times: Vec<f64>,
        xi: Vec<f64>,
        rate: Option<Vec<f64>>,
    ) -> Result<Self> {
        for (&t, &x) in times.iter().zip(&xi) {
            if x < -1e-8 || x.is_nan() {
                return Err(FluctuationError::NegativeXi { t, xi: x });
            }
            if x >= 1.0 {
                return Err(FluctuationError::XiAtOne { t, xi: x });
            }
        }
        Ok(XiResult {
            route: route.into(),
            beta,
            times,
            xi,
            rate,
        })
    }

    pub fn route(&self) -> &str {
        &self.route
    }

    pub fn beta(&self) -> f64 {
        self.beta
    }

    pub fn times(&self) -> &[f64] {
        &self.times
    }

    pub fn xi(&self) -> &[f64] {
        &self.xi
    }

    pub fn final_xi(&self) -> f64 {
        *self.xi.last().expect("non-empty")
    }

    /// `d xi / dt` at the nodes, where the route provides it.
    pub fn rate(&self) -> Option<&[f64]> {
        self.rate.as_deref()
    }

    /// `-d ln(1 - xi) / dt` at node `k`.
    pub fn log_rate(&self, k: usize) -> Option<f64> {
        self.rate.as_ref().map(|r| r[k] / (1.0 - self.xi[k]))
    }

    pub fn bound(&self) -> Result<BoundSeries> {
        jensen_bound(self, self.beta)
    }
}

/// `-beta^{-1} ln(1 - xi)` per node, capped near `xi = 1`.
#[derive(Debug, Clone, PartialEq)]
pub struct BoundSeries {
    pub times: Vec<f64>,
    pub values: Vec<f64>,
    /// Set when some `1 - xi` fell below [`BOUND_CAP_GAP`].
    pub capped: bool,
}

impl BoundSeries {
    pub fn final_value(&self) -> f64 {
        *self.values.last().expect("non-empty")
    }
}

pub fn jensen_bound(xi: &XiResult, beta: f64) -> Result<BoundSeries> {
    let mut capped = false;
    let mut values = Vec::with_capacity(xi.xi.len());
    for &x in &xi.xi {
        if x >= 1.0 || x.is_nan() {
            return Err(FluctuationError::UndefinedBound(x));
        }
        let gap = if 1.0 - x < BOUND_CAP_GAP {
            capped = true;
            BOUND_CAP_GAP
        } else {
            1.0 - x
        };
        let v = if gap == 1.0 - x { -(-x).ln_1p() } else { -gap.ln() };
        values.push(v / beta);
    }
    Ok(BoundSeries {
        times: xi.times.clone(),
        values,
        capped,
    })
}

fn check_equilibrium_start(problem: &MomentProblem) -> Result<()> {
    let beta = problem.bath().beta();
    let equilibrium = equilibrium_population(problem.protocol().energy(0.0), beta);
    let mean_excited = problem.ensemble().mean_excited();
    if (mean_excited - equilibrium).abs() > 1e-12 {
        return Err(FluctuationError::NotEquilibrium {
            mean_excited,
            equilibrium,
        });
    }
    Ok(())
}

/// `Z_t / Z_0` with `Z = 1 + e^{-beta E}`.
fn partition_ratio(problem: &MomentProblem, t: f64) -> f64 {
    let beta = problem.bath().beta();
    let z = |e: f64| 1.0 + (-beta * e).exp();
    z(problem.protocol().energy(t)) / z(problem.protocol().energy(0.0))
}

/// `xi = 1 - G(beta, t) / (Z_t / Z_0)` from an MGF series containing `u = beta`.
pub fn xi_from_mgf(g: &MgfSeries, problem: &MomentProblem) -> Result<XiResult> {
    check_equilibrium_start(problem)?;
    let beta = problem.bath().beta();
    let j = g
        .u()
        .iter()
        .position(|&u| (u - beta).abs() <= 1e-15 * beta)
        .ok_or_else(|| FluctuationError::Precondition(format!("MGF series lacks u = {beta}")))?;
    let xi = g
        .times()
        .iter()
        .enumerate()
        .map(|(k, &t)| 1.0 - g.value(k, j) / partition_ratio(problem, t))
        .collect();
    XiResult::new("mgf-ansatz", beta, g.times().to_vec(), xi, None)
}

/// Per fine point: `beta Edot / F`, the damping rate of `z`, and the source `<e|C_null(beta)|e>`.
#[derive(Default)]
struct XiColumns {
    drive: Vec<f64>,
    damping: Vec<f64>,
    source: Vec<f64>,
}

/// Columns with `Edot` from the right, and again with its left limit.
struct XiTables {
    right: XiColumns,
    left: XiColumns,
}

impl XiTables {
    fn new(problem: &MomentProblem) -> Self {
        let beta = problem.bath().beta();
        let kernels = problem.kernels();
        let mut right = XiColumns::default();
        let mut left = XiColumns::default();
        for (i, &time) in problem.fine().iter().enumerate() {
            let e = problem.protocol().energy(time);
            let r = rates(e, problem.bath());
            let f = partition_ratio(problem, time);
            let weight = beta * kernels.tilted_weight(beta, i);
            for (cols, edot) in [(&mut right, kernels.edot(i)), (&mut left, kernels.edot_left(i))] {
                cols.drive.push(beta * edot / f);
                cols.damping.push(beta * edot * (1.0 - equilibrium_population(e, beta)) + r.total());
                cols.source.push(weight * edot);
            }
        }
        XiTables { right, left }
    }

    fn at(&self, stage: Stage) -> &XiColumns {
        if stage.left {
            &self.left
        } else {
            &self.right
        }
    }
}

/// `xi' = (beta Edot / F) z`, `z' = -z [beta Edot (1 - p_eq) + r_down + r_up] + <e|C_null(beta)|e>`.
struct XiSystem(XiTables);

impl OdeSystem for XiSystem {
    fn dim(&self) -> usize {
        2
    }

    fn rhs(&self, at: Stage, y: &[f64], dy: &mut [f64]) {
        let (i, c) = (at.fine, self.0.at(at));
        dy[0] = c.drive[i] * y[1];
        dy[1] = -c.damping[i] * y[1] + c.source[i];
    }
}

fn ode_solution(problem: &MomentProblem) -> (Vec<f64>, Vec<f64>) {
    let system = XiSystem(XiTables::new(problem));
    let states = integrate(&system, problem.fine(), &[0.0, 0.0]);
    let xi = states.iter().map(|s| s[0]).collect();
    let rate = states
        .iter()
        .enumerate()
        .map(|(k, s)| if k == 0 { system.0.right.drive[0] } else { system.0.left.drive[2 * k] } * s[1])
        .collect();
    (xi, rate)
}

/// `xi` from the second-order equation `xi'' + phi xi' = alpha`, integrated as
/// the first-order pair `(xi, z)` with `xi' = (beta Edot / F) z`, which stays
/// regular where `Edot` vanishes or diverges.
pub fn xi_from_ode(problem: &MomentProblem) -> Result<XiResult> {
    check_equilibrium_start(problem)?;
    let (xi, rate) = ode_solution(problem);
    if problem.settings().check_resolution {
        let (fine_xi, _) = ode_solution(&problem.refined()?);
        let (a, b) = (*xi.last().unwrap(), *fine_xi.last().unwrap());
        let change = (a - b).abs() / b.abs().max(1e-8);
        let tol = problem.settings().resolution_tol;
        if change > tol {
            return Err(moment_ode::MomentError::Resolution {
                quantity: "xi(tau)".into(),
                change,
                tol,
            }
            .into());
        }
    }
    XiResult::new(
        "phi-alpha-ode",
        problem.bath().beta(),
        problem.nodes().to_vec(),
        xi,
        Some(rate),
    )
}

/// `xi(t) = int_0^t (beta Edot_s / F_s) int_0^s e^{-(Gamma_s - Gamma_s')} alpha-source ds' ds`
/// with `Gamma = ln(1 + e^{beta E}) + Lambda_down + Lambda_up` taken from the kernel tables.
pub fn xi_formal_solution(problem: &MomentProblem) -> Result<XiResult> {
    check_equilibrium_start(problem)?;
    let beta = problem.bath().beta();
    let tables = XiTables::new(problem);
    let decay = problem.kernels().decay();
    let fine = problem.fine();
    let gamma: Vec<f64> = fine
        .iter()
        .enumerate()
        .map(|(i, &t)| {
            let be = beta * problem.protocol().energy(t);
            let log_z = if be > 30.0 { be + (-be).exp().ln_1p() } else { be.exp().ln_1p() };
            log_z + decay.hazard_down(i) + decay.hazard_up(i)
        })
        .collect();
    let (r, l) = (&tables.right, &tables.left);
    let z = damped_cumulative_sided(fine, &gamma, &r.source, &l.source);
    let times_z = |d: &[f64]| -> Vec<f64> { z.iter().zip(d).map(|(z, d)| z * d).collect() };
    let (integrand, integrand_left) = (times_z(&r.drive), times_z(&l.drive));
    let xi_fine = cumulative_sided(fine, &integrand, &integrand_left);
    let xi = xi_fine.iter().step_by(2).copied().collect();
    let rate = (0..problem.nodes().len())
        .map(|k| if k == 0 { integrand[0] } else { integrand_left[2 * k] })
        .collect();
    XiResult::new("formal-solution", beta, problem.nodes().to_vec(), xi, Some(rate))
}

/// Coefficients of `xi'' + phi xi' = alpha` at one fine point.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PhiAlpha {
    pub t: f64,
    pub phi: f64,
    pub alpha: f64,
}

/// `phi = beta Edot tanh(beta E / 2) - Eddot / Edot + gamma (2 n + 1)` and
/// `alpha = (beta Edot / F) <e|C_null(beta)|e>` with `F = Z_t / Z_0` on the fine grid.
pub fn phi_alpha(problem: &MomentProblem) -> Vec<PhiAlpha> {
    let beta = problem.bath().beta();
    let kernels = problem.kernels();
    problem
        .fine()
        .iter()
        .enumerate()
        .map(|(i, &t)| {
            let p = problem.protocol();
            let e = p.energy(t);
            let edot = kernels.edot(i);
            let r = rates(e, problem.bath());
            let phi = beta * edot * (0.5 * beta * e).tanh() - p.eddot(t) / edot + r.total();
            let alpha = beta * edot / partition_ratio(problem, t) * kernels.source_mgf(beta, i).ee;
            PhiAlpha { t, phi, alpha }
        })
        .collect()
}

/// A way of computing `xi`, selectable by name.
pub trait XiRoute: Send + Sync {
    fn describe(&self) -> &str;
    fn compute(&self, problem: &MomentProblem) -> Result<XiResult>;
}

struct MgfAnsatz;
struct PhiAlphaOde;
struct FormalSolution;

impl XiRoute for MgfAnsatz {
    fn describe(&self) -> &str {
        "tilted generating function at u = beta"
    }
    fn compute(&self, problem: &MomentProblem) -> Result<XiResult> {
        let beta = problem.bath().beta();
        xi_from_mgf(&problem.mgf(&[beta])?, problem)
    }
}

impl XiRoute for PhiAlphaOde {
    fn describe(&self) -> &str {
        "second-order equation for xi"
    }
    fn compute(&self, problem: &MomentProblem) -> Result<XiResult> {
        xi_from_ode(problem)
    }
}

impl XiRoute for FormalSolution {
    fn describe(&self) -> &str {
        "nested quadrature of the formal solution"
    }
    fn compute(&self, problem: &MomentProblem) -> Result<XiResult> {
        xi_formal_solution(problem)
    }
}

pub fn xi_routes() -> Registry<dyn XiRoute> {
    let mut r: Registry<dyn XiRoute> = Registry::new("xi route");
    r.register("mgf-ansatz", Box::new(MgfAnsatz));
    r.register("phi-alpha-ode", Box::new(PhiAlphaOde));
    r.register("formal-solution", Box::new(FormalSolution));
    r
}
