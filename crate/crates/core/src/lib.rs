//! Two-stage online surface-code decoding laboratory.
//!
//! The crate is organised bottom-up:
//!
//! * [`lattice`] holds planar and merged (lattice-surgery) code geometry, the
//!   phenomenological noise sampler, detection-event extraction and logical
//!   judgement.
//! * [`graph`] turns a space-time layout into a matching graph whose edges are
//!   the elementary error mechanisms.
//! * [`nn`] is the fully-convolutional first stage, in FP32 and XNOR-binarised
//!   form, plus the `NEOW` weight format.
//! * [`online`] is the buffered greedy second stage and the end-to-end pipeline.
//! * [`mwpm`] is an exact subset-DP matching reference decoder.
//! * [`dataset`] reads and writes `NEOD` training records.

pub mod dataset;
pub mod graph;
pub mod lattice;
pub mod mwpm;
pub mod nn;
pub mod online;
pub mod rng;

pub use graph::{DecodingGraph, DecodingGraphs, Mechanism};
pub use lattice::{
    extract_detection, judge_logical, ls_logical_xx, sample_errors, CellKind, CodeLayout,
    DetectionVolume, ErrorTableau, LatticeError, LogicalOutcome, LsSchedule, NoiseParams, Pauli,
    Shape, Timeline,
};
