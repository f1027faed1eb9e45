//! Command-line runner for the `scalelab-core` checks: configuration,
//! execution, and JSON / CSV reports.

pub mod cli;
pub mod config;
pub mod parse;
pub mod report;
mod runner;

pub use config::{Check, ConfigError, RunConfig};
pub use report::{write_csv, write_json, Report, Status};
pub use runner::run;

/// Process exit codes.
pub mod exit {
    pub const PASS: u8 = 0;
    pub const GATE_FAILED: u8 = 1;
    pub const CONFIG_ERROR: u8 = 2;
}
