//! Toeplitz hashing over GF(2).
//!
//! An `out × in` Toeplitz matrix is fixed by `in + out − 1` seed bits. Entry
//! `(i, j)` is `seed[j − i + out − 1]`, so every diagonal is constant and row
//! `i` is the contiguous seed window starting at `out − 1 − i`. That lets
//! each output bit be computed as a word-wise AND + popcount against a
//! shifted view of the seed.

use super::PostprocessError;
use crate::bits::BitString;
use crate::rng::RandomStream;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ToeplitzSeed(BitString);

impl ToeplitzSeed {
    pub fn new(bits: BitString) -> Self {
        Self(bits)
    }

    /// Seed length for hashing `in_len` bits down to `out_len`.
    pub fn required_len(in_len: usize, out_len: usize) -> usize {
        if in_len == 0 || out_len == 0 {
            0
        } else {
            in_len + out_len - 1
        }
    }

    pub fn random(in_len: usize, out_len: usize, rng: &mut RandomStream) -> Self {
        Self(BitString::random(Self::required_len(in_len, out_len), rng))
    }

    pub fn bits(&self) -> &BitString {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }
}

pub fn toeplitz_hash(input: &BitString, seed: &ToeplitzSeed, out_len: usize) -> Result<BitString, PostprocessError> {
    let expected = ToeplitzSeed::required_len(input.len(), out_len);
    if seed.len() != expected {
        return Err(PostprocessError::SeedLength { expected, actual: seed.len() });
    }
    if input.is_empty() {
        return Ok(BitString::zeros(out_len));
    }
    let mut seed_words = seed.bits().words().to_vec();
    seed_words.push(0);
    let input_words = input.words();

    let mut out = BitString::zeros(out_len);
    for row in 0..out_len {
        let start = out_len - 1 - row;
        let base = start / 64;
        let shift = start % 64;
        let mut acc = 0u64;
        for (w, &x) in input_words.iter().enumerate() {
            let lo = seed_words[base + w];
            let window = if shift == 0 { lo } else { (lo >> shift) | (seed_words[base + w + 1] << (64 - shift)) };
            acc ^= x & window;
        }
        if acc.count_ones() & 1 == 1 {
            out.set(row, 1);
        }
    }
    Ok(out)
}
