//! Front end for `ekdev-core`: JSON configuration, subcommands, CSV and SVG
//! output.

pub mod commands;
pub mod config;
pub mod error;
pub mod output;
pub mod verify;

pub use commands::Report;
pub use config::{Format, RunConfig};
pub use error::{CliError, EXIT_CONFIG, EXIT_OK, EXIT_VERIFY_FAILED};
