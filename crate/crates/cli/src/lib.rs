//! Batch driver around `nonneg_approx`: set-spec and polynomial file formats,
//! CSV experiment rows, and the `construct`, `check`, `sweep` and `gsa`
//! commands.
//!
//! Exit codes: 0 success, 1 a check was violated, 2 invalid input,
//! 3 a sample budget or coefficient cap was exceeded.

pub mod commands;
pub mod document;
pub mod experiment;
pub mod setspec;

use std::fmt;

pub use document::PolynomialDocument;
pub use experiment::ExperimentRow;
pub use setspec::SetSpec;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ExitStatus {
    Success = 0,
    Violated = 1,
    InvalidInput = 2,
    BudgetExceeded = 3,
}

impl ExitStatus {
    pub fn code(self) -> i32 {
        self as i32
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CliError {
    pub status: ExitStatus,
    pub message: String,
}

impl CliError {
    pub fn invalid(message: impl Into<String>) -> Self {
        Self {
            status: ExitStatus::InvalidInput,
            message: message.into(),
        }
    }

    // I/O failures share the invalid-input code; there is no separate one.
    pub fn io(message: impl Into<String>) -> Self {
        Self::invalid(message)
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.message)
    }
}

impl std::error::Error for CliError {}

impl From<nonneg_approx::Error> for CliError {
    fn from(e: nonneg_approx::Error) -> Self {
        use nonneg_approx::Error as E;
        let status = match e {
            E::BudgetExceeded { .. } | E::CoefficientCap { .. } => ExitStatus::BudgetExceeded,
            _ => ExitStatus::InvalidInput,
        };
        Self {
            status,
            message: e.to_string(),
        }
    }
}

/// Parses a comma-separated list such as `0.1,0.05,0.025`.
pub fn parse_list<T: std::str::FromStr>(text: &str, what: &str) -> Result<Vec<T>, CliError> {
    let items: Result<Vec<T>, _> = text
        .split(',')
        .map(str::trim)
        .filter(|s| !s.is_empty())
        .map(|s| s.parse::<T>().map_err(|_| CliError::invalid(format!("bad {what} entry {s:?}"))))
        .collect();
    let items = items?;
    if items.is_empty() {
        return Err(CliError::invalid(format!("{what} must not be empty")));
    }
    Ok(items)
}
