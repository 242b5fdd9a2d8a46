//! Command-line surface of the heat-transformer simulator: JSON configs in,
//! trajectory CSVs, metrics JSON and SVG plots out.

pub mod commands;
pub mod config;
mod error;
pub mod output;
pub mod plot;

pub use config::{load_config, parse_config, RunConfig};
pub use error::{CliError, Result};
