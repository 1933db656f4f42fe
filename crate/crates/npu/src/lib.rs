//! Behavioural and cost model of a bit-serial SFQ XNOR neural processing unit.

pub mod cells;
pub mod power;
pub mod sim;
pub mod throughput;

use thiserror::Error;

pub use cells::{npu_cost, CellCounts, CellKind, CellSpec, NpuReport, CELLS};
pub use power::{decoder_power_report, ersfq_power, rsfq_power, PowerParams, PowerReport, PHI0_WB};
pub use sim::{npu_simulate, npu_simulate_with_fault, popcount_oracle, Fault, NpuRun, NpuState};
pub use throughput::{count_mults, throughput_check, MultCount, Throughput};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum NpuError {
    #[error("weight stream has {weights} bits but input stream has {inputs}")]
    StreamLength { weights: usize, inputs: usize },
    #[error("threshold {t} exceeds fan-in {n}")]
    ThresholdAboveFanin { t: usize, n: usize },
    #[error("counter width {0} out of range")]
    CounterWidth(u32),
    #[error("{k}-bit counter cannot resolve threshold {t} over {n} inputs")]
    CounterTooSmall { k: u32, n: usize, t: usize },
    #[error("code distance {0} is not an odd number >= 3")]
    InvalidDistance(usize),
    #[error("power parameters must be non-negative")]
    NegativeParameter,
}
