//! Exact moment generating function of the discrete stroboscopic work process,
//! by brute-force path enumeration and by per-step 2x2 products.
//!
//! Everything here is written independently of the Monte Carlo and ODE crates
//! so that agreement between the three is a genuine check.

mod enumerate;
mod error;
mod model;
mod product;

pub use enumerate::enumerate_mgf;
pub use error::{OracleError, Result};
pub use model::{DiscreteModel, MAX_STEPS};
pub use product::{classical_mgf, matrix_product_mgf};
