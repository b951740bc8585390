//! Library backing the `aol` binary: configuration, snapshot IO, CSV
//! output, subcommand logic and the acceptance-verification suites.

pub mod commands;
pub mod config;
pub mod csvio;
pub mod error;
pub mod snapshot;
pub mod verify;

pub use config::{parse_config, RunConfig};
pub use error::{CliError, Result};
