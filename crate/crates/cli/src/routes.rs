use model_core::Registry;
use moment_ode::MomentProblem;
use oracle_enum::{matrix_product_mgf, DiscreteModel};

use crate::config::Setup;
use crate::error::Result;

/// Mean, variance and third central moment of the work at time `t`, with
/// standard errors where the route is statistical (zero otherwise).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StatsRow {
    pub t: f64,
    pub mean: f64,
    pub variance: f64,
    pub third: f64,
    pub se_mean: f64,
    pub se_variance: f64,
    pub se_third: f64,
}

impl StatsRow {
    pub const COLUMNS: [&'static str; 7] = ["t", "mean", "variance", "kappa3", "se_mean", "se_variance", "se_kappa3"];

    pub fn values(&self) -> Vec<f64> {
        vec![self.t, self.mean, self.variance, self.third, self.se_mean, self.se_variance, self.se_third]
    }

    fn exact(t: f64, mean: f64, variance: f64, third: f64) -> Self {
        StatsRow {
            t,
            mean,
            variance,
            third,
            se_mean: 0.0,
            se_variance: 0.0,
            se_third: 0.0,
        }
    }
}

/// One way of obtaining work statistics, selectable by name.
pub trait WorkRoute: Send + Sync {
    fn describe(&self) -> &str;
    /// Rows in increasing time; the last row is the runtime.
    fn statistics(&self, setup: &Setup) -> Result<Vec<StatsRow>>;
}

struct Hierarchy;
struct MonteCarlo;
struct Oracle;

impl WorkRoute for Hierarchy {
    fn describe(&self) -> &str {
        "moment hierarchy on the graded grid, every node"
    }

    fn statistics(&self, s: &Setup) -> Result<Vec<StatsRow>> {
        let series = MomentProblem::new(&s.ensemble, &s.protocol, &s.bath, s.settings)?.hierarchy(3)?;
        Ok((0..series.len())
            .map(|k| {
                let c = series.cumulants(k);
                StatsRow::exact(series.times()[k], c[0], c[1], c[2])
            })
            .collect())
    }
}

impl WorkRoute for MonteCarlo {
    fn describe(&self) -> &str {
        "trajectory sampling at the runtime, jackknife errors"
    }

    fn statistics(&self, s: &Setup) -> Result<Vec<StatsRow>> {
        let w = trajectory_mc::run_batch(&s.ensemble, &s.protocol, &s.bath, s.dt, s.trajectories, s.seed)?;
        Ok(vec![StatsRow {
            t: s.protocol.tau(),
            mean: w.mean,
            variance: w.variance(),
            third: w.central[1],
            se_mean: w.se_mean,
            se_variance: w.se_variance,
            se_third: w.se_third,
        }])
    }
}

impl WorkRoute for Oracle {
    fn describe(&self) -> &str {
        "exact statistics of the discrete-step model, from ln G(u) by finite differences"
    }

    fn statistics(&self, s: &Setup) -> Result<Vec<StatsRow>> {
        let model = DiscreteModel::from_protocol(&s.protocol, &s.bath, s.oracle_steps)?;
        let h = 0.05;
        let k = (-3..=3)
            .map(|j| Ok(matrix_product_mgf(&s.ensemble, &model, j as f64 * h)?.ln()))
            .collect::<Result<Vec<f64>>>()?;
        let d1 = (-k[0] + 9.0 * k[1] - 45.0 * k[2] + 45.0 * k[4] - 9.0 * k[5] + k[6]) / (60.0 * h);
        let d2 = (2.0 * k[0] - 27.0 * k[1] + 270.0 * k[2] - 490.0 * k[3] + 270.0 * k[4] - 27.0 * k[5] + 2.0 * k[6])
            / (180.0 * h * h);
        let d3 = (-k[0] + 8.0 * k[1] - 13.0 * k[2] + 13.0 * k[4] - 8.0 * k[5] + k[6]) / (8.0 * h * h * h);
        // G(u) = <e^{-uW}>, so odd cumulants flip sign.
        Ok(vec![StatsRow::exact(s.protocol.tau(), -d1, d2, -d3)])
    }
}

/// `hierarchy`, `monte-carlo`, `oracle`.
pub fn work_routes() -> Registry<dyn WorkRoute> {
    let mut r: Registry<dyn WorkRoute> = Registry::new("work route");
    r.register("hierarchy", Box::new(Hierarchy));
    r.register("monte-carlo", Box::new(MonteCarlo));
    r.register("oracle", Box::new(Oracle));
    r
}
