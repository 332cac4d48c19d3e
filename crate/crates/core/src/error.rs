use thiserror::Error;

use crate::io::FormatError;
use crate::synth::SynthError;

/// Cross-type invariant violations caught when a scene is assembled.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum ValidationError {
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),
    #[error("non-finite value in {0}")]
    NonFinite(String),
    #[error("label {value} at index {index} is out of range for {num_classes} classes")]
    BadLabel {
        index: usize,
        value: i32,
        num_classes: u32,
    },
    #[error("mask {id}: stored area {stored} does not match bitmap popcount {actual}")]
    AreaMismatch { id: u32, stored: u64, actual: u64 },
    #[error("config value out of range: {0}")]
    OutOfRange(String),
}

/// Top-level error for anything that can go wrong between files and labels.
#[derive(Debug, Error)]
pub enum Error {
    #[error(transparent)]
    Validation(#[from] ValidationError),
    #[error(transparent)]
    Format(#[from] FormatError),
    #[error(transparent)]
    Synth(#[from] SynthError),
    #[error(transparent)]
    Metrics(#[from] crate::eval::MetricsError),
}
