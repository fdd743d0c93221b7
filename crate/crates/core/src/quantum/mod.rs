//! Exact state-vector simulation for up to three qubits.

mod cloning;
mod state;
mod teleport;

pub use cloning::{cloning_signaling_demo, CloningError, CloningStats, OutcomeCounts};
pub use state::{bell_phi, make_qubit, measure_pair, Basis, MeasurementOutcome, Pauli, PureState, MAX_QUBITS};
pub use teleport::{apply_correction, teleport, Teleported};

pub use num_complex::Complex64 as Complex;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum QuantumError {
    #[error("state is not normalized (squared norm {0})")]
    Normalization(f64),
    #[error("amplitudes must be finite")]
    NonFinite,
    #[error("qubit index {index} out of range for a {num_qubits}-qubit state")]
    Index { index: usize, num_qubits: usize },
    #[error("expected a {expected}-qubit state, got {actual}")]
    Arity { expected: usize, actual: usize },
    #[error("unsupported amplitude vector of length {0} (1 to 3 qubits)")]
    Size(usize),
    #[error("qubit {0} is entangled with the rest of the register")]
    Entangled(usize),
}
