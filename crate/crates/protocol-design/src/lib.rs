//! Named drive protocols and numerically optimal finite-time erasure.

mod builtin;
mod erasure;
mod error;
mod knots;
mod quasi_newton;

pub use builtin::{builtin_protocol, protocol_registry, ProtocolFactory};
pub use erasure::{baseline_cost, minimum_erasure_time, optimize_erasure_protocol, ErasureOutcome, ErasureSpec};
pub use error::{DesignError, Result};
pub use knots::{read_knots, write_knots};
pub use quasi_newton::{minimize, Minimum, MinimizeSettings};
