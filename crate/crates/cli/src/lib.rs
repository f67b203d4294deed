// SPDX-License-Identifier: Apache-2.0

//! Scenario parsing, runs, CSV/SVG output and the `fracres` commands.

pub mod commands;
pub mod plot;
pub mod scenario;
pub mod table;

use thiserror::Error;

pub use scenario::{Drive, Initial, ParseError, ScenarioConfig};

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Parse(#[from] ParseError),
    #[error("{0}")]
    Usage(String),
    #[error("{path}: {source}")]
    Io { path: String, source: std::io::Error },
    #[error("{0}")]
    Core(#[from] fracres_core::Error),
}

impl CliError {
    /// 1 for usage and parse problems, 2 for numerical aborts.
    pub fn exit_code(&self) -> i32 {
        use fracres_core::Error as E;
        match self {
            CliError::Core(
                E::NonFinite { .. } | E::NormDrift { .. } | E::TraceDrift { .. } | E::PositivityViolation { .. },
            ) => 2,
            _ => 1,
        }
    }
}
