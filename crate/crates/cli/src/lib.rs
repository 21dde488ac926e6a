//! Configuration-driven experiment runner for `ipsim-core`.

pub mod config;
pub mod error;
pub mod output;
pub mod run;

pub use config::ExperimentConfig;
pub use error::CliError;
pub use run::{run, Command, Outcome, Overrides};
