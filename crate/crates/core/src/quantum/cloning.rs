//! The counterfactual "perfect cloner" signalling experiment.
//!
//! Physical cloning of an unknown state is impossible. The simulator can
//! nevertheless copy the receiver's half of a Bell pair after the sender has
//! measured, because the collapsed state is known classically inside the
//! simulation. Running the copies through both bases shows what a cloner
//! would let the receiver learn: the sender's basis choice, i.e. a signal.

use serde::Serialize;

use super::state::{bell_phi, Basis};
use super::QuantumError;
use crate::rng::RandomStream;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct OutcomeCounts {
    pub zeros: usize,
    pub ones: usize,
}

impl OutcomeCounts {
    pub fn total(&self) -> usize {
        self.zeros + self.ones
    }

    pub fn freq_zero(&self) -> f64 {
        self.zeros as f64 / self.total() as f64
    }

    /// Distance of the majority frequency from 1/2; 0.5 means deterministic.
    pub fn certainty(&self) -> f64 {
        (self.freq_zero() - 0.5).abs()
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct CloningStats {
    pub alice_basis: String,
    pub alice_bit: u8,
    pub n_copies: usize,
    /// Copies measured in the Z basis (outcome 0 is `|0⟩`).
    pub z_copies: OutcomeCounts,
    /// Copies measured in the X basis (outcome 0 is `|+⟩`).
    pub x_copies: OutcomeCounts,
    /// The basis Bob infers Alice used: whichever copy set is more certain.
    /// Ties go to Z.
    pub inferred_basis: String,
}

#[derive(Debug, thiserror::Error, PartialEq)]
pub enum CloningError {
    #[error("copy count must be even and at least 2, got {0}")]
    Copies(usize),
    #[error(transparent)]
    Quantum(#[from] QuantumError),
}

pub fn cloning_signaling_demo(
    n_copies: usize,
    alice_basis: Basis,
    rng: &mut RandomStream,
) -> Result<CloningStats, CloningError> {
    if n_copies < 2 || !n_copies.is_multiple_of(2) {
        return Err(CloningError::Copies(n_copies));
    }
    let after = bell_phi().measure(0, alice_basis, rng)?;
    let bob_half = after.post_state.factor_qubit(1)?;

    let mut tally = |basis: Basis| -> Result<OutcomeCounts, QuantumError> {
        let mut counts = OutcomeCounts { zeros: 0, ones: 0 };
        for _ in 0..n_copies / 2 {
            let copy = bob_half.clone();
            match copy.measure(0, basis, rng)?.bit {
                0 => counts.zeros += 1,
                _ => counts.ones += 1,
            }
        }
        Ok(counts)
    };
    let z_copies = tally(Basis::Z)?;
    let x_copies = tally(Basis::X)?;
    let inferred = if x_copies.certainty() > z_copies.certainty() { Basis::X } else { Basis::Z };

    Ok(CloningStats {
        alice_basis: alice_basis.label(),
        alice_bit: after.bit,
        n_copies,
        z_copies,
        x_copies,
        inferred_basis: inferred.label(),
    })
}
