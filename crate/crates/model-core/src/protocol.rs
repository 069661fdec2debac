use std::fmt::Debug;
use std::sync::Arc;

use crate::error::{ModelError, Result};

/// A gap schedule `E(t)` with analytic first and second derivatives.
pub trait Schedule: Send + Sync + Debug {
    fn name(&self) -> &str;
    fn params(&self) -> Vec<f64>;
    fn energy(&self, t: f64) -> f64;
    fn rate(&self, t: f64) -> f64;
    fn accel(&self, t: f64) -> f64;
    /// Limit of `rate` from below; differs from `rate` only at kinks.
    fn rate_left(&self, t: f64) -> f64 {
        self.rate(t)
    }
    /// Times at which the derivatives jump.
    fn kinks(&self) -> Vec<f64> {
        Vec::new()
    }
}

/// A schedule restricted to `[0, tau]`.
#[derive(Debug, Clone)]
pub struct DriveProtocol {
    schedule: Arc<dyn Schedule>,
    tau: f64,
}

const VALIDATION_SAMPLES: usize = 256;

impl DriveProtocol {
    pub fn new(schedule: Arc<dyn Schedule>, tau: f64) -> Result<Self> {
        if !(tau.is_finite() && tau > 0.0) {
            return Err(ModelError::invalid("protocol.tau", format!("{tau} is not positive")));
        }
        for k in 0..=VALIDATION_SAMPLES {
            let t = tau * k as f64 / VALIDATION_SAMPLES as f64;
            let e = schedule.energy(t);
            if !(e.is_finite() && e >= 0.0) {
                return Err(ModelError::invalid(
                    "protocol",
                    format!("{} gives E({t}) = {e}; gaps must be finite and non-negative", schedule.name()),
                ));
            }
        }
        Ok(DriveProtocol { schedule, tau })
    }

    pub fn from_schedule(schedule: impl Schedule + 'static, tau: f64) -> Result<Self> {
        Self::new(Arc::new(schedule), tau)
    }

    pub fn tau(&self) -> f64 {
        self.tau
    }

    pub fn name(&self) -> &str {
        self.schedule.name()
    }

    pub fn params(&self) -> Vec<f64> {
        self.schedule.params()
    }

    pub fn schedule(&self) -> &Arc<dyn Schedule> {
        &self.schedule
    }

    pub fn energy(&self, t: f64) -> f64 {
        self.schedule.energy(t)
    }

    pub fn edot(&self, t: f64) -> f64 {
        self.schedule.rate(t)
    }

    /// `Edot` approached from earlier times; schedules are right-continuous at kinks.
    pub fn edot_left(&self, t: f64) -> f64 {
        self.schedule.rate_left(t)
    }

    pub fn eddot(&self, t: f64) -> f64 {
        self.schedule.accel(t)
    }

    /// `Edot(t)`, or the forward secant over `h` where the derivative is singular.
    pub fn edot_or_secant(&self, t: f64, h: f64) -> f64 {
        let d = self.edot(t);
        if d.is_finite() {
            d
        } else {
            (self.energy(t + h) - self.energy(t)) / h
        }
    }

    /// Kinks strictly inside `(0, tau)`, sorted.
    pub fn kinks(&self) -> Vec<f64> {
        let mut k: Vec<f64> = self
            .schedule
            .kinks()
            .into_iter()
            .filter(|&t| t > 0.0 && t < self.tau)
            .collect();
        k.sort_by(f64::total_cmp);
        k.dedup();
        k
    }

    /// Same schedule on a different horizon.
    pub fn with_tau(&self, tau: f64) -> Result<Self> {
        Self::new(Arc::clone(&self.schedule), tau)
    }

    /// Largest relative mismatch between the analytic derivatives and central
    /// differences of `E` at `samples` interior points that stay clear of kinks.
    pub fn derivative_defect(&self, samples: usize) -> f64 {
        let kinks = self.kinks();
        let step = 1e-4 * self.tau;
        let mut worst: f64 = 0.0;
        for k in 1..samples {
            let t = self.tau * k as f64 / samples as f64;
            if kinks.iter().any(|&c| (c - t).abs() < 4.0 * step) || t < 4.0 * step {
                continue;
            }
            let h = step.min(1e-3 * t);
            let (em, e0, ep) = (self.energy(t - h), self.energy(t), self.energy(t + h));
            let d1 = (ep - em) / (2.0 * h);
            let d2 = (ep - 2.0 * e0 + em) / (h * h);
            let scale1 = self.edot(t).abs().max(1e-3);
            let scale2 = self.eddot(t).abs().max(1e-2);
            worst = worst
                .max((d1 - self.edot(t)).abs() / scale1)
                .max((d2 - self.eddot(t)).abs() / scale2);
        }
        worst
    }
}

/// `E = slope * t`.
#[derive(Debug, Clone, Copy)]
pub struct Linear {
    slope: f64,
}

impl Linear {
    pub fn new(slope: f64) -> Self {
        Linear { slope }
    }
}

impl Schedule for Linear {
    fn name(&self) -> &str {
        "linear"
    }
    fn params(&self) -> Vec<f64> {
        vec![self.slope]
    }
    fn energy(&self, t: f64) -> f64 {
        self.slope * t
    }
    fn rate(&self, _t: f64) -> f64 {
        self.slope
    }
    fn accel(&self, _t: f64) -> f64 {
        0.0
    }
}

/// `E = coeff * t^exponent`.
#[derive(Debug, Clone, Copy)]
pub struct Power {
    coeff: f64,
    exponent: f64,
}

impl Power {
    pub fn new(coeff: f64, exponent: f64) -> Self {
        Power { coeff, exponent }
    }
}

impl Schedule for Power {
    fn name(&self) -> &str {
        "power"
    }
    fn params(&self) -> Vec<f64> {
        vec![self.coeff, self.exponent]
    }
    fn energy(&self, t: f64) -> f64 {
        self.coeff * t.powf(self.exponent)
    }
    fn rate(&self, t: f64) -> f64 {
        self.coeff * self.exponent * t.powf(self.exponent - 1.0)
    }
    fn accel(&self, t: f64) -> f64 {
        let p = self.exponent;
        self.coeff * p * (p - 1.0) * t.powf(p - 2.0)
    }
}

/// `E = tanh(a t)`.
#[derive(Debug, Clone, Copy)]
pub struct Tanh {
    a: f64,
}

impl Tanh {
    pub fn new(a: f64) -> Self {
        Tanh { a }
    }
}

impl Schedule for Tanh {
    fn name(&self) -> &str {
        "tanh"
    }
    fn params(&self) -> Vec<f64> {
        vec![self.a]
    }
    fn energy(&self, t: f64) -> f64 {
        (self.a * t).tanh()
    }
    fn rate(&self, t: f64) -> f64 {
        let th = (self.a * t).tanh();
        self.a * (1.0 - th * th)
    }
    fn accel(&self, t: f64) -> f64 {
        let th = (self.a * t).tanh();
        -2.0 * self.a * self.a * th * (1.0 - th * th)
    }
}

/// `E = final_energy * t / tau`.
#[derive(Debug, Clone, Copy)]
pub struct Ramp {
    final_energy: f64,
    tau: f64,
}

impl Ramp {
    pub fn new(final_energy: f64, tau: f64) -> Self {
        Ramp { final_energy, tau }
    }
}

impl Schedule for Ramp {
    fn name(&self) -> &str {
        "ramp"
    }
    fn params(&self) -> Vec<f64> {
        vec![self.final_energy]
    }
    fn energy(&self, t: f64) -> f64 {
        self.final_energy * t / self.tau
    }
    fn rate(&self, _t: f64) -> f64 {
        self.final_energy / self.tau
    }
    fn accel(&self, _t: f64) -> f64 {
        0.0
    }
}

/// Time-independent gap.
#[derive(Debug, Clone, Copy)]
pub struct Frozen {
    energy: f64,
}

impl Frozen {
    pub fn new(energy: f64) -> Self {
        Frozen { energy }
    }
}

impl Schedule for Frozen {
    fn name(&self) -> &str {
        "constant"
    }
    fn params(&self) -> Vec<f64> {
        vec![self.energy]
    }
    fn energy(&self, _t: f64) -> f64 {
        self.energy
    }
    fn rate(&self, _t: f64) -> f64 {
        0.0
    }
    fn accel(&self, _t: f64) -> f64 {
        0.0
    }
}

/// Linear interpolation through `(t, E)` knots, held flat outside them.
#[derive(Debug, Clone)]
pub struct PiecewiseLinear {
    knots: Vec<(f64, f64)>,
}

impl PiecewiseLinear {
    pub fn new(knots: Vec<(f64, f64)>) -> Result<Self> {
        if knots.len() < 2 {
            return Err(ModelError::invalid("knots", "need at least two knots"));
        }
        for (i, w) in knots.windows(2).enumerate() {
            if !(w[1].0 > w[0].0) {
                return Err(ModelError::invalid(
                    format!("knots[{}]", i + 1),
                    "knot times must strictly increase",
                ));
            }
        }
        if knots.iter().any(|&(t, e)| !t.is_finite() || !e.is_finite()) {
            return Err(ModelError::invalid("knots", "non-finite entry"));
        }
        Ok(PiecewiseLinear { knots })
    }

    pub fn knots(&self) -> &[(f64, f64)] {
        &self.knots
    }

    fn segment(&self, t: f64) -> Option<usize> {
        let n = self.knots.len();
        if t < self.knots[0].0 || t >= self.knots[n - 1].0 {
            return None;
        }
        Some(self.knots.partition_point(|k| k.0 <= t) - 1)
    }
}

impl Schedule for PiecewiseLinear {
    fn name(&self) -> &str {
        "piecewise"
    }
    fn params(&self) -> Vec<f64> {
        self.knots.iter().flat_map(|&(t, e)| [t, e]).collect()
    }
    fn energy(&self, t: f64) -> f64 {
        match self.segment(t) {
            Some(i) => {
                let (t0, e0) = self.knots[i];
                let (t1, e1) = self.knots[i + 1];
                e0 + (e1 - e0) * (t - t0) / (t1 - t0)
            }
            None if t < self.knots[0].0 => self.knots[0].1,
            None => self.knots[self.knots.len() - 1].1,
        }
    }
    fn rate(&self, t: f64) -> f64 {
        match self.segment(t) {
            Some(i) => {
                let (t0, e0) = self.knots[i];
                let (t1, e1) = self.knots[i + 1];
                (e1 - e0) / (t1 - t0)
            }
            None => 0.0,
        }
    }
    fn rate_left(&self, t: f64) -> f64 {
        let n = self.knots.len();
        if t <= self.knots[0].0 || t > self.knots[n - 1].0 {
            return 0.0;
        }
        // Segment whose right end is at or beyond t.
        let i = self.knots.partition_point(|k| k.0 < t) - 1;
        let (t0, e0) = self.knots[i];
        let (t1, e1) = self.knots[i + 1];
        (e1 - e0) / (t1 - t0)
    }
    fn accel(&self, _t: f64) -> f64 {
        0.0
    }
    fn kinks(&self) -> Vec<f64> {
        self.knots.iter().map(|k| k.0).collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn builtin_shapes() {
        let lin = DriveProtocol::from_schedule(Linear::new(0.5), 10.0).unwrap();
        assert_eq!((lin.energy(4.0), lin.edot(4.0), lin.eddot(4.0)), (2.0, 0.5, 0.0));
        let cube = DriveProtocol::from_schedule(Power::new(1.0, 1.0 / 3.0), 10.0).unwrap();
        assert!((cube.energy(8.0) - 2.0).abs() < 1e-15);
        assert!((cube.edot(8.0) - 1.0 / 12.0).abs() < 1e-15);
        assert!(cube.edot(0.0).is_infinite());
        assert!((cube.edot_or_secant(0.0, 1e-6) - 1e4).abs() < 1e-6);
        let th = DriveProtocol::from_schedule(Tanh::new(2.0), 1.0).unwrap();
        assert_eq!((th.energy(0.0), th.edot(0.0)), (0.0, 2.0));
    }

    #[test]
    fn rejects_negative_gaps_and_bad_tau() {
        assert!(DriveProtocol::from_schedule(Linear::new(-1.0), 1.0).is_err());
        assert!(DriveProtocol::from_schedule(Linear::new(1.0), 0.0).is_err());
        assert!(PiecewiseLinear::new(vec![(0.0, 0.0), (0.0, 1.0)]).is_err());
    }

    #[test]
    fn analytic_derivatives_match_differences() {
        let cases: Vec<DriveProtocol> = vec![
            DriveProtocol::from_schedule(Linear::new(0.5), 5.0).unwrap(),
            DriveProtocol::from_schedule(Power::new(1.0, 0.5), 5.0).unwrap(),
            DriveProtocol::from_schedule(Power::new(1.0, 1.0 / 3.0), 5.0).unwrap(),
            DriveProtocol::from_schedule(Tanh::new(2.0), 5.0).unwrap(),
            DriveProtocol::from_schedule(Ramp::new(3.0, 5.0), 5.0).unwrap(),
            DriveProtocol::from_schedule(
                PiecewiseLinear::new(vec![(0.0, 0.0), (1.0, 2.0), (5.0, 2.5)]).unwrap(),
                5.0,
            )
            .unwrap(),
        ];
        for p in &cases {
            assert!(p.derivative_defect(200) < 1e-6, "{}: {}", p.name(), p.derivative_defect(200));
        }
    }

    #[test]
    fn piecewise_interpolates_and_reports_interior_kinks() {
        let pw = PiecewiseLinear::new(vec![(0.0, 0.0), (1.0, 2.0), (3.0, 3.0)]).unwrap();
        let p = DriveProtocol::from_schedule(pw, 3.0).unwrap();
        assert_eq!(p.energy(0.5), 1.0);
        assert_eq!(p.energy(2.0), 2.5);
        assert_eq!(p.edot(2.0), 0.5);
        assert_eq!(p.energy(3.0), 3.0);
        assert_eq!(p.kinks(), vec![1.0]);
        assert_eq!((p.edot(1.0), p.edot_left(1.0)), (0.5, 2.0));
        assert_eq!((p.edot(3.0), p.edot_left(3.0)), (0.0, 0.5));
        assert_eq!(p.edot_left(0.5), 2.0);
        let lin = DriveProtocol::from_schedule(Linear::new(0.5), 1.0).unwrap();
        assert_eq!(lin.edot_left(0.3), 0.5);
    }
}
