//! The key-generation protocol state machine.

mod config;
mod keys;
mod result;
mod session;
mod sift;

pub use config::ProtocolConfig;
pub use keys::{KeyMaterial, Stage, StageSummary};
pub use result::{AbortReason, Outcome, ProtocolResult, RunStats, SuccessData};
pub use session::{quantum_phase, run_bb84_pm, run_protocol, Delivered, Fault, RawRecords, Scheme, Session};
pub use sift::{estimate_parameters, hoeffding_margin, sift, Estimate, Sifted, MIN_SIFTED_LEN};

use crate::postprocess::PostprocessError;
use crate::quantum::QuantumError;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum ProtocolError {
    #[error("invalid configuration: {0}")]
    Config(String),
    #[error("length mismatch: {left} vs {right}")]
    LengthMismatch { left: usize, right: usize },
    #[error("need at least {need} sifted bits for estimation, have {have}")]
    InsufficientData { have: usize, need: usize },
    #[error("basis at angle {0} rad cannot be announced (protocol uses Z and X only)")]
    UnsupportedBasis(f64),
    #[error("malformed public message: {0}")]
    Message(&'static str),
    #[error(transparent)]
    Quantum(#[from] QuantumError),
    #[error(transparent)]
    Postprocess(#[from] PostprocessError),
}
