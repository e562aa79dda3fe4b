//! Library half of the `cusim` binary: config parsing, presets, the
//! experiment runner, and report/export serialization. The binary is a thin
//! dispatcher over these so the whole surface stays testable in-process.

use std::fmt;

pub mod config;
pub mod export;
pub mod presets;
pub mod report;
pub mod runner;

/// CLI failures split by exit code: configuration problems exit 1,
/// numerical or tomography failures exit 2.
#[derive(Debug)]
pub enum CliError {
    Config(String),
    Numerical(String),
}

impl CliError {
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Config(_) => 1,
            CliError::Numerical(_) => 2,
        }
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Config(msg) => write!(f, "config error: {msg}"),
            CliError::Numerical(msg) => write!(f, "numerical failure: {msg}"),
        }
    }
}

impl std::error::Error for CliError {}
