//! Domain types and elementary thermodynamics of a qubit `H_t = E_t |e><e|`
//! weakly coupled to a thermal bath.
//!
//! Units follow hbar = k_B = 1. Matrices use the basis order (e, g).

mod bath;
mod ensemble;
mod error;
mod grid;
mod matrix;
mod protocol;
pub mod quad;
mod registry;
mod thermo;

pub use bath::{BathSpec, Coupling, DEFAULT_GAP_FLOOR};
pub use ensemble::{DEFAULT_QUAD_NODES, 
    ensemble_registry, EnsembleFactory, EnsembleSpec, PopulationDensity, PurePrep,
    UniformPopulation,
};
pub use error::{ModelError, Result};
pub use grid::{GridSettings, TimeGrid};
pub use matrix::{Level, TwoByTwo};
pub use protocol::{
    DriveProtocol, Frozen, Linear, PiecewiseLinear, Power, Ramp, Schedule, Tanh,
};
pub use registry::Registry;
pub use thermo::{
    equilibrium_population, free_energy_change, free_energy_change_quadrature, occupation, rates,
    relaxation_time, Rates,
};
