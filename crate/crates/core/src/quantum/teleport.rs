//! Teleportation of a single qubit over a shared Bell pair.
//!
//! Register layout: qubit 0 holds the input state, qubits 1 and 2 hold the
//! Bell pair (qubit 1 with the sender, qubit 2 with the receiver). The Bell
//! measurement is CNOT(0→1), H(0), then Z measurements of qubits 0 and 1,
//! which maps the Bell basis to outcomes as
//!
//! | outcome (x, y) | Bell state      | correction |
//! |----------------|-----------------|------------|
//! | (0, 0)         | (|00⟩+|11⟩)/√2  | I          |
//! | (0, 1)         | (|01⟩+|10⟩)/√2  | X          |
//! | (1, 0)         | (|00⟩−|11⟩)/√2  | Z          |
//! | (1, 1)         | (|01⟩−|10⟩)/√2  | XZ         |
//!
//! `x` is the phase bit and `y` the parity bit. Any other labelling of the
//! four outcomes works as long as the correction table follows it.

use super::state::{bell_phi, Basis, Pauli, PureState};
use super::QuantumError;
use crate::rng::RandomStream;

#[derive(Debug, Clone, PartialEq)]
pub struct Teleported {
    pub x: u8,
    pub y: u8,
    /// Receiver's qubit before the Pauli correction.
    pub received: PureState,
}

pub fn teleport(psi: &PureState, rng: &mut RandomStream) -> Result<Teleported, QuantumError> {
    psi.expect_qubits(1)?;
    let register = psi.tensor(&bell_phi())?.apply_cnot(0, 1)?.apply_hadamard(0)?;
    let first = register.measure(0, Basis::Z, rng)?;
    let second = first.post_state.measure(1, Basis::Z, rng)?;
    let received = second.post_state.factor_qubit(2)?;
    Ok(Teleported { x: first.bit, y: second.bit, received })
}

/// Undoes the Pauli frame left on the receiver's qubit by outcome `(x, y)`.
pub fn apply_correction(received: &PureState, x: u8, y: u8) -> Result<PureState, QuantumError> {
    received.expect_qubits(1)?;
    match (x, y) {
        (0, 0) => Ok(received.clone()),
        (0, 1) => received.apply_pauli(0, Pauli::X),
        (1, 0) => received.apply_pauli(0, Pauli::Z),
        _ => received.apply_pauli(0, Pauli::Z)?.apply_pauli(0, Pauli::X),
    }
}
