use crate::bath::{BathSpec, Coupling};
use crate::protocol::DriveProtocol;
use crate::quad::adaptive_simpson;

/// Emission (`down`) and absorption (`up`) rates.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Rates {
    pub down: f64,
    pub up: f64,
}

impl Rates {
    pub fn total(&self) -> f64 {
        self.down + self.up
    }
}

/// Bose-Einstein occupation. Constant coupling evaluates it at `max(E, gap_floor)`;
/// Ohmic coupling diverges at `E = 0`, where only the products in [`rates`] are finite.
pub fn occupation(e: f64, bath: &BathSpec) -> f64 {
    let x = match bath.coupling() {
        Coupling::Constant { .. } => e.max(bath.gap_floor()),
        Coupling::Ohmic { .. } => e,
    };
    1.0 / (bath.beta() * x).exp_m1()
}

pub fn rates(e: f64, bath: &BathSpec) -> Rates {
    match bath.coupling() {
        Coupling::Constant { gamma0 } => {
            let n = occupation(e, bath);
            Rates {
                down: gamma0 * (n + 1.0),
                up: gamma0 * n,
            }
        }
        Coupling::Ohmic { kappa } => {
            // kappa * E * n = (kappa / beta) * x / (e^x - 1)
            let x = bath.beta() * e;
            let ratio = if x < 1e-8 { 1.0 - 0.5 * x } else { x / x.exp_m1() };
            let up = kappa / bath.beta() * ratio;
            Rates {
                down: up + kappa * e,
                up,
            }
        }
    }
}

pub fn equilibrium_population(e: f64, beta: f64) -> f64 {
    let w = (-beta * e).exp();
    w / (1.0 + w)
}

/// Relaxation time `(1 - 2 p_eq) / gamma`, finite at `E = 0` for both couplings.
pub fn relaxation_time(e: f64, bath: &BathSpec) -> f64 {
    let beta = bath.beta();
    let polarization = (0.5 * beta * e).tanh();
    match bath.coupling() {
        Coupling::Constant { gamma0 } => polarization / gamma0,
        Coupling::Ohmic { kappa } => {
            if beta * e < 1e-8 {
                beta / (2.0 * kappa)
            } else {
                polarization / (kappa * e)
            }
        }
    }
}

fn log_partition_excess(e: f64, beta: f64) -> f64 {
    (-beta * e).exp().ln_1p()
}

/// Equilibrium free-energy change between the endpoint gaps of `protocol`.
pub fn free_energy_change(protocol: &DriveProtocol, beta: f64) -> f64 {
    let e0 = protocol.energy(0.0);
    let e1 = protocol.energy(protocol.tau());
    (log_partition_excess(e0, beta) - log_partition_excess(e1, beta)) / beta
}

/// Same quantity as [`free_energy_change`], by quadrature of `p_eq(E)` over the gap.
pub fn free_energy_change_quadrature(protocol: &DriveProtocol, beta: f64) -> f64 {
    let e0 = protocol.energy(0.0);
    let e1 = protocol.energy(protocol.tau());
    adaptive_simpson(|e| equilibrium_population(e, beta), e0, e1, 1e-13)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::protocol::{DriveProtocol, Linear, Ramp};

    fn close(a: f64, b: f64, tol: f64) -> bool {
        (a - b).abs() <= tol * b.abs().max(1e-300)
    }

    #[test]
    fn occupation_examples() {
        let bath = BathSpec::constant(1.0, 0.1).unwrap();
        assert!(close(occupation(1.0, &bath), 0.581_976_706_869_326_4, 1e-12));
        assert_eq!(occupation(f64::INFINITY, &bath), 0.0);
        let floored = bath.with_gap_floor(1e-4).unwrap();
        let n = occupation(0.0, &floored);
        assert!((n - 9999.500_008_333).abs() < 1e-6);
        // expansion 1/(beta eps) - 1/2
        assert!((n - (1e4 - 0.5)).abs() < 1e-5);
    }

    #[test]
    fn rate_examples() {
        let bath = BathSpec::constant(1.0, 0.1).unwrap();
        let r = rates(1.0, &bath);
        let n = 1.0 / (1f64.exp() - 1.0);
        assert!(close(r.down, 0.1 * (n + 1.0), 1e-14));
        assert!(close(r.up, 0.1 * n, 1e-14));
        assert!((r.down - 0.158198).abs() < 1e-6);
        let far = rates(800.0, &bath);
        assert_eq!(far.up, 0.0);
        assert!(close(far.down, 0.1, 1e-15));

        let ohmic = BathSpec::ohmic(1.0, 0.1).unwrap();
        let zero = rates(0.0, &ohmic);
        assert_eq!(zero.up, 0.1);
        assert_eq!(zero.down, 0.1);
        let small = rates(1e-9, &ohmic);
        assert!(close(small.up, 0.1, 1e-8));
    }

    #[test]
    fn ohmic_rates_continuous_across_series_switch() {
        let bath = BathSpec::ohmic(2.0, 0.3).unwrap();
        let x: f64 = 0.999e-8;
        let below = rates(x / 2.0, &bath);
        assert!(close(below.up, 0.3 / 2.0 * x / x.exp_m1(), 1e-14));
    }

    #[test]
    fn equilibrium_examples() {
        assert_eq!(equilibrium_population(0.0, 1.0), 0.5);
        assert_eq!(equilibrium_population(f64::INFINITY, 1.0), 0.0);
        assert!(close(equilibrium_population(1.0, 1.0), 1.0 / (1f64.exp() + 1.0), 1e-15));
    }

    #[test]
    fn relaxation_time_matches_inverse_relaxation_rate() {
        for bath in [
            BathSpec::constant(1.3, 0.2).unwrap(),
            BathSpec::ohmic(0.7, 0.1).unwrap(),
        ] {
            for e in [0.05, 0.5, 2.0, 7.0] {
                let r = rates(e, &bath);
                assert!(close(relaxation_time(e, &bath), 1.0 / r.total(), 1e-12));
            }
        }
        let constant = BathSpec::constant(1.0, 0.1).unwrap();
        assert_eq!(relaxation_time(0.0, &constant), 0.0);
    }

    #[test]
    fn free_energy_examples() {
        let flat = DriveProtocol::from_schedule(crate::protocol::Frozen::new(2.0), 3.0).unwrap();
        assert_eq!(free_energy_change(&flat, 1.0), 0.0);
        let far = DriveProtocol::from_schedule(Linear::new(1e3), 1.0).unwrap();
        assert!(close(free_energy_change(&far, 1.0), 2f64.ln(), 1e-12));
        let unit = DriveProtocol::from_schedule(Ramp::new(1.0, 4.0), 4.0).unwrap();
        let exact = (2.0 / (1.0 + (-1f64).exp())).ln();
        assert!(close(free_energy_change(&unit, 1.0), exact, 1e-14));
        assert!((exact - 0.379885).abs() < 1e-6);
        assert!(close(free_energy_change_quadrature(&unit, 1.0), exact, 1e-8));
    }
}
