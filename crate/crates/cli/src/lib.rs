//! Batch front end for the `spdc-core` simulator: a JSON run configuration,
//! one subcommand per study, and CSV/JSON artifacts with a manifest that
//! reproduces the run.

pub mod commands;
pub mod config;
pub mod output;

pub use commands::{run, Command, Report, Setup};
pub use config::RunConfig;
