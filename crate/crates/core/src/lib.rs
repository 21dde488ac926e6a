//! Simulation and verification toolkit for finite-range interacting particle
//! systems on transitive graphs.
//!
//! Rule evaluation and the exact solver are generic over [`Scalar`]; the
//! aliases below fix the scalar to `f64`, which is what the simulator and the
//! statistics use.

pub mod dynamics;
pub mod error;
pub mod exact;
pub mod graph;
pub mod scalar;
pub mod simulate;
pub mod stats;

pub use error::{Error, Result};
pub use scalar::Scalar;

pub type Rule = dynamics::LocalRule<f64>;
pub type Generator = exact::GeneratorMatrix<f64>;
pub type Influence = dynamics::InfluenceMatrix<f64>;
