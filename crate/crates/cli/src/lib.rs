//! Command-line front end for the `cbf-core` checks.

pub mod cli;
pub mod commands;
pub mod config;
pub mod error;
pub mod report;
pub mod suite;

pub use error::{CliError, CliResult};
