//! Classical post-processing: reconciliation, verification, privacy
//! amplification and the finite-key length bookkeeping.

mod amplify;
mod cascade;
mod entropy;
mod toeplitz;
mod verify;

pub use amplify::{final_length, privacy_amplify, read_published_seed};
pub use cascade::{cascade_reconcile, Cascade, ReconciliationReport, BLOCK_SIZE_CONSTANT};
pub use entropy::binary_entropy;
pub use toeplitz::{toeplitz_hash, ToeplitzSeed};
pub use verify::{verify_keys, DEFAULT_TAG_BITS};

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum PostprocessError {
    #[error("length mismatch: {left} vs {right} bits")]
    LengthMismatch { left: usize, right: usize },
    #[error("argument out of domain: {0}")]
    Domain(String),
    #[error("Toeplitz seed has {actual} bits, expected {expected}")]
    SeedLength { expected: usize, actual: usize },
    #[error("requested {requested} output bits from a {available}-bit key")]
    Length { requested: usize, available: usize },
    #[error("malformed public message: {0}")]
    Message(&'static str),
}

fn same_length(a: &crate::BitString, b: &crate::BitString) -> Result<(), PostprocessError> {
    if a.len() != b.len() {
        return Err(PostprocessError::LengthMismatch { left: a.len(), right: b.len() });
    }
    Ok(())
}
