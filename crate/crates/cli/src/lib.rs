//! Driver for the `angelesco` binary: configuration, CSV/JSON output and SVG plots.

pub mod config;
pub mod csv;
pub mod error;
pub mod run;
pub mod svg;

pub use config::{RunConfig, Tolerances};
pub use error::CliError;
