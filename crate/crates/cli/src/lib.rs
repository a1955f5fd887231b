//! Command-line front end for gradcs: experiment sweeps, sample-complexity
//! tables and validation suites.

pub mod cli;
pub mod config;
pub mod experiment;
pub mod theory;
pub mod validate;

use thiserror::Error;

/// Environment fallback for `--out`.
pub const OUT_DIR_ENV: &str = "GRADCS_OUT_DIR";

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{}", match .line {
        Some(l) => format!("config line {l}: {msg}"),
        None => format!("config: {msg}"),
    })]
    Config { line: Option<usize>, msg: String },

    #[error("{0}")]
    Input(String),

    #[error(transparent)]
    Core(#[from] gradcs::Error),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),

    #[error("{0}")]
    Failed(String),
}

impl CliError {
    /// 2 for bad input, 1 for failures at run time.
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Config { .. } | CliError::Input(_) => 2,
            CliError::Core(gradcs::Error::Unsupported(_) | gradcs::Error::Parse { .. }) => 2,
            _ => 1,
        }
    }
}
