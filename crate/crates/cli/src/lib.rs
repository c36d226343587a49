//! Shared pieces of the `chokepoint` command-line tool: input-document
//! parsing and report rendering. The binary in `main.rs` wires these to the
//! argument parser; integration tests drive them directly.

pub mod formats;
pub mod report;

use chokepoint::morph::MorphError;
use chokepoint::network::NetError;
use chokepoint::predict::PredictError;
use chokepoint::screening::ScreeningError;

/// Error classes mapped to exit codes: `Input` exits 1, `Infeasible`
/// (enumeration budget or exact-search limit exceeded) exits 2.
#[derive(Debug)]
pub enum CliError {
    Input(String),
    Infeasible(String),
}

impl std::fmt::Display for CliError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            CliError::Input(m) | CliError::Infeasible(m) => write!(f, "{m}"),
        }
    }
}

impl std::error::Error for CliError {}

impl From<ScreeningError> for CliError {
    fn from(e: ScreeningError) -> Self {
        CliError::Input(e.to_string())
    }
}

impl From<MorphError> for CliError {
    fn from(e: MorphError) -> Self {
        match e {
            MorphError::BudgetExceeded { .. } => CliError::Infeasible(e.to_string()),
            _ => CliError::Input(e.to_string()),
        }
    }
}

impl From<NetError> for CliError {
    fn from(e: NetError) -> Self {
        match e {
            NetError::TooLarge { .. } => CliError::Infeasible(e.to_string()),
            _ => CliError::Input(e.to_string()),
        }
    }
}

impl From<PredictError> for CliError {
    fn from(e: PredictError) -> Self {
        match e {
            PredictError::Morph(inner) => inner.into(),
            other => CliError::Input(other.to_string()),
        }
    }
}
