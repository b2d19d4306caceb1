//! Command-line front end: TOML experiment configs, the built-in scenarios,
//! CSV and JSON output, and bound tables.

mod app;
pub mod config;
mod error;
pub mod preset;
pub mod summary;

pub use app::{bounds, execute, Cli, Command, RunArgs};
pub use config::{apply_override, ConfigFile, Sweep};
pub use error::{CliError, Result};
pub use preset::Preset;
