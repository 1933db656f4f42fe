//! Experiment front-end: dataset generation, decoding sweeps, lattice-surgery
//! runs, NPU verification and power reports.

pub mod commands;
pub mod config;
pub mod stats;

use thiserror::Error;

use neoqec_core::lattice::LatticeError;
use neoqec_core::mwpm::MwpmError;
use neoqec_core::online::OnlineError;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("config error: {0}")]
    Config(String),
    #[error("i/o error: {0}")]
    Io(String),
    /// Carries the full report so it can still be printed.
    #[error("verification failed")]
    Verify(String),
    #[error("decoder error: {0}")]
    Decode(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Config(_) => 2,
            CliError::Verify(_) => 3,
            CliError::Io(_) => 4,
            CliError::Decode(_) => 1,
        }
    }
}

impl From<LatticeError> for CliError {
    fn from(e: LatticeError) -> Self {
        CliError::Config(e.to_string())
    }
}

impl From<OnlineError> for CliError {
    fn from(e: OnlineError) -> Self {
        CliError::Decode(e.to_string())
    }
}

impl From<MwpmError> for CliError {
    fn from(e: MwpmError) -> Self {
        CliError::Decode(e.to_string())
    }
}
