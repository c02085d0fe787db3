//! Batch front-end of `skyhaul`: scenario files, point evaluations, sweeps,
//! figure recipes and analytic-versus-simulation validation.
//!
//! The `skyhaul` binary is a thin shell over these functions.

pub mod config;
pub mod error;
pub mod figures;
pub mod manifest;
pub mod run;
pub mod validate;

pub use config::ScenarioConfig;
pub use error::CliError;
pub use manifest::RunManifest;
pub use run::{Mode, Row, RunOptions};
