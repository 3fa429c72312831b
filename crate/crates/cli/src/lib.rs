//! Batch front end: flat config files in, CSV and plot-data files out.

pub mod config;
pub mod dispatch;

pub use config::{Command, ConfigError, Overrides, RunConfig, Value};
pub use dispatch::{dispatch, Outcome};
