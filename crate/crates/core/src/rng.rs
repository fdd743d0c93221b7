//! Deterministic, splittable random streams.
//!
//! Every source of randomness in a session (each party's basis choices,
//! measurement outcomes, channel noise, the eavesdropper, each classical
//! post-processing step) draws from its own [`RandomStream`]. Streams are
//! derived from a parent by hashing the parent key with a label, so adding
//! draws to one party never shifts the values seen by another.

use rand::{Rng, RngCore, SeedableRng};
use rand_chacha::ChaCha20Rng;
use sha2::{Digest, Sha256};

/// A counter-based ChaCha20 generator keyed from a 64-bit seed.
///
/// Not `Clone`: a stream has a single owner and is consumed by draws.
#[derive(Debug)]
pub struct RandomStream {
    key: [u8; 32],
    rng: ChaCha20Rng,
}

impl RandomStream {
    pub fn from_seed(seed: u64) -> Self {
        let mut hasher = Sha256::new();
        hasher.update(b"qkdsim/root");
        hasher.update(seed.to_le_bytes());
        Self::from_key(hasher.finalize().into())
    }

    fn from_key(key: [u8; 32]) -> Self {
        Self { key, rng: ChaCha20Rng::from_seed(key) }
    }

    /// Independent child stream. Does not consume from `self`.
    pub fn substream(&self, label: &str) -> Self {
        self.indexed(label, 0)
    }

    /// Independent child stream for the `index`-th member of a family.
    pub fn indexed(&self, label: &str, index: u64) -> Self {
        let mut hasher = Sha256::new();
        hasher.update(self.key);
        hasher.update((label.len() as u64).to_le_bytes());
        hasher.update(label.as_bytes());
        hasher.update(index.to_le_bytes());
        Self::from_key(hasher.finalize().into())
    }

    /// Uniform in `[0, 1)`.
    pub fn uniform(&mut self) -> f64 {
        self.rng.random::<f64>()
    }

    pub fn bernoulli(&mut self, p: f64) -> bool {
        p > 0.0 && self.uniform() < p
    }

    pub fn bit(&mut self) -> u8 {
        (self.rng.next_u32() & 1) as u8
    }

    /// Uniform in `0..n`. Panics if `n == 0`.
    pub fn below(&mut self, n: usize) -> usize {
        self.rng.random_range(0..n)
    }

    pub fn next_u64(&mut self) -> u64 {
        self.rng.next_u64()
    }
}

/// Derives a 64-bit seed from a base seed and a path of indices.
pub fn derive_seed(base: u64, path: &[u64]) -> u64 {
    let mut hasher = Sha256::new();
    hasher.update(b"qkdsim/derive");
    hasher.update(base.to_le_bytes());
    for p in path {
        hasher.update(p.to_le_bytes());
    }
    let digest = hasher.finalize();
    u64::from_le_bytes(digest[..8].try_into().expect("digest has 32 bytes"))
}
