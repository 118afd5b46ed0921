//! Command-line front end: scenario configuration, dispatch to the solvers
//! and CSV/snapshot output.

pub mod commands;
pub mod config;
pub mod error;
pub mod figures;

pub use commands::{run, Report};
pub use config::{parse_config, Command, ScenarioConfig, OUTPUT_DIR_ENV};
pub use error::{exit, CliError};
