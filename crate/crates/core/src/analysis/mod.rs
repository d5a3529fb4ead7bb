//! Error bounds, parameter suggestions and measurements against a 128-bit
//! ground truth.

mod adversarial;
mod bounds;
mod reference;
mod sweep;

use thiserror::Error;

use crate::mtbdd::DdError;
use crate::numerics::NumericsError;
use crate::quantum::QuantumError;

pub use adversarial::{adversarial_run, AdversarialReport, ADVERSARIAL_MAX_QUBITS, SEED_OFFSET};
pub use bounds::{bound_general, bound_unit, suggest_bits, suggest_delta, BoundReport};
pub use reference::{
    compare_to_reference, compare_with, max_distance, max_distance_dense, max_distance_traversal,
    per_gate_check, ErrorReport, PerGateReport, Reference, DENSE_COMPARE_MAX_QUBITS,
};
pub use sweep::{
    read_csv, read_json, sweep, sweep_with_workers, write_csv, write_json, SweepGrid, SweepRecord,
    CSV_HEADER,
};

#[derive(Debug, Error)]
pub enum AnalysisError {
    #[error("{0}")]
    InvalidArgument(String),
    #[error("planted leaf did not capture the products (n={n}, delta={delta:e}, bits={bits})")]
    SeedNotCaptured { n: u32, delta: f64, bits: u32 },
    #[error(transparent)]
    Quantum(#[from] QuantumError),
    #[error(transparent)]
    Dd(#[from] DdError),
    #[error(transparent)]
    Numerics(#[from] NumericsError),
    #[error("csv: {0}")]
    Csv(#[from] csv::Error),
    #[error("json: {0}")]
    Json(#[from] serde_json::Error),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl AnalysisError {
    /// The arithmetic error at the bottom of this error, if any.
    pub fn numerics(&self) -> Option<&NumericsError> {
        match self {
            AnalysisError::Numerics(e) | AnalysisError::Dd(DdError::Numerics(e)) => Some(e),
            AnalysisError::Quantum(q) => q.numerics(),
            _ => None,
        }
    }
}

pub type Result<T, E = AnalysisError> = std::result::Result<T, E>;
