//! Command implementations for the `flute` binary.

pub mod args;
pub mod commands;
pub mod config;
pub mod error;
pub mod report;

pub use args::{run, Cli, Command};
pub use config::{parse_config, RunConfig};
pub use error::{exit, CliError};
