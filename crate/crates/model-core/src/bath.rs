use crate::error::{ModelError, Result};

/// Regularizing energy below which constant-coupling rates are frozen.
pub const DEFAULT_GAP_FLOOR: f64 = 1e-6;

/// Coupling law `gamma(E)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Coupling {
    Constant { gamma0: f64 },
    /// `gamma = kappa * E`.
    Ohmic { kappa: f64 },
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BathSpec {
    beta: f64,
    coupling: Coupling,
    gap_floor: f64,
}

impl BathSpec {
    pub fn new(beta: f64, coupling: Coupling, gap_floor: f64) -> Result<Self> {
        if !(beta.is_finite() && beta > 0.0) {
            return Err(ModelError::invalid("bath.beta", format!("{beta} is not positive")));
        }
        let strength = match coupling {
            Coupling::Constant { gamma0 } => gamma0,
            Coupling::Ohmic { kappa } => kappa,
        };
        if !(strength.is_finite() && strength > 0.0) {
            return Err(ModelError::invalid(
                "bath.coupling",
                format!("strength {strength} is not positive"),
            ));
        }
        if !(gap_floor.is_finite() && gap_floor > 0.0) {
            return Err(ModelError::invalid(
                "bath.gap_floor",
                format!("{gap_floor} is not positive"),
            ));
        }
        Ok(BathSpec {
            beta,
            coupling,
            gap_floor,
        })
    }

    pub fn constant(beta: f64, gamma0: f64) -> Result<Self> {
        Self::new(beta, Coupling::Constant { gamma0 }, DEFAULT_GAP_FLOOR)
    }

    pub fn ohmic(beta: f64, kappa: f64) -> Result<Self> {
        Self::new(beta, Coupling::Ohmic { kappa }, DEFAULT_GAP_FLOOR)
    }

    pub fn with_gap_floor(self, gap_floor: f64) -> Result<Self> {
        Self::new(self.beta, self.coupling, gap_floor)
    }

    pub fn beta(&self) -> f64 {
        self.beta
    }

    pub fn coupling(&self) -> Coupling {
        self.coupling
    }

    pub fn gap_floor(&self) -> f64 {
        self.gap_floor
    }

    /// Bare coupling strength at gap `e` (no floor applied).
    pub fn gamma(&self, e: f64) -> f64 {
        match self.coupling {
            Coupling::Constant { gamma0 } => gamma0,
            Coupling::Ohmic { kappa } => kappa * e,
        }
    }
}
