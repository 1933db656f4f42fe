//! Code geometry, noise, syndromes and logical judgement.

mod detection;
mod layout;
mod logical;
mod noise;
mod tableau;
mod timeline;

pub use detection::{extract_detection, raw_syndrome, DetectionVolume};
pub use layout::{CellKind, CodeLayout, LogicalOp, Pauli, Shape};
pub use logical::{judge_logical, ls_logical_xx, LogicalOutcome};
pub use noise::{sample_errors, NoiseParams};
pub use tableau::{apply_frame, ErrorTableau};
pub use timeline::{LsSchedule, Phase, Timeline};

use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum LatticeError {
    #[error("code distance must be odd and at least 3, got {0}")]
    InvalidDistance(usize),
    #[error("physical error rate must lie in [0, 1], got {0}")]
    InvalidRate(f64),
    #[error("at least one noisy cycle is required")]
    NoCycles,
    #[error("tableau/volume dimensions do not match the layout")]
    DimensionMismatch,
    #[error("operation requires a {expected:?} layout")]
    WrongShape { expected: Shape },
    #[error("schedule distance {schedule} does not match layout distance {layout}")]
    ScheduleMismatch { schedule: usize, layout: usize },
    #[error("residual still carries {0} detection events; logical judgement is undefined")]
    NontrivialResidual(usize),
}
