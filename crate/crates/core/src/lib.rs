//! Valid inequalities for battery storage scheduling.
//!
//! The crate builds linear and second-order-cone cuts for the feasible set of
//! a single battery over a horizon of `T` periods, certifies them with
//! brute-force oracles, and benchmarks relaxations built from them against
//! exact mixed-integer models. See the `examples/` directory for a tour.

pub mod battery;
pub mod bench;
pub mod cuts;
pub mod error;
pub mod soc;
pub mod solve;
pub mod submodular;

pub use battery::{BatteryParams, FeasibleSet, Trajectory};
pub use cuts::{CutFamily, LinearCut};
pub use error::{Error, Result};
