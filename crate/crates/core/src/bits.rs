//! Packed bit strings.

use std::fmt;

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::rng::RandomStream;

/// A bit string packed into 64-bit words, bit `i` at word `i / 64`,
/// position `i % 64`. Bits past `len` are always zero.
#[derive(Clone, Default, PartialEq, Eq, Hash)]
pub struct BitString {
    words: Vec<u64>,
    len: usize,
}

impl BitString {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn zeros(len: usize) -> Self {
        Self { words: vec![0; len.div_ceil(64)], len }
    }

    /// Builds from a slice of 0/1 values; any nonzero entry counts as 1.
    pub fn from_bits(bits: &[u8]) -> Self {
        bits.iter().map(|&b| b != 0).collect()
    }

    pub fn random(len: usize, rng: &mut RandomStream) -> Self {
        let mut words: Vec<u64> = (0..len.div_ceil(64)).map(|_| rng.next_u64()).collect();
        if let Some(last) = words.last_mut() {
            *last &= tail_mask(len);
        }
        Self { words, len }
    }

    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    pub fn words(&self) -> &[u64] {
        &self.words
    }

    pub fn get(&self, i: usize) -> u8 {
        assert!(i < self.len, "bit index {i} out of range for length {}", self.len);
        ((self.words[i / 64] >> (i % 64)) & 1) as u8
    }

    pub fn set(&mut self, i: usize, bit: u8) {
        assert!(i < self.len, "bit index {i} out of range for length {}", self.len);
        let mask = 1u64 << (i % 64);
        if bit != 0 {
            self.words[i / 64] |= mask;
        } else {
            self.words[i / 64] &= !mask;
        }
    }

    pub fn flip(&mut self, i: usize) {
        assert!(i < self.len, "bit index {i} out of range for length {}", self.len);
        self.words[i / 64] ^= 1u64 << (i % 64);
    }

    pub fn push(&mut self, bit: u8) {
        if self.len.is_multiple_of(64) {
            self.words.push(0);
        }
        self.len += 1;
        self.set(self.len - 1, bit);
    }

    pub fn iter(&self) -> impl Iterator<Item = u8> + '_ {
        (0..self.len).map(move |i| self.get(i))
    }

    pub fn count_ones(&self) -> usize {
        self.words.iter().map(|w| w.count_ones() as usize).sum()
    }

    /// Bitwise XOR. `None` if the lengths differ.
    pub fn xor(&self, other: &BitString) -> Option<BitString> {
        if self.len != other.len {
            return None;
        }
        let words = self.words.iter().zip(&other.words).map(|(a, b)| a ^ b).collect();
        Some(Self { words, len: self.len })
    }

    /// Number of differing positions. `None` if the lengths differ.
    pub fn hamming(&self, other: &BitString) -> Option<usize> {
        self.xor(other).map(|d| d.count_ones())
    }

    /// Parity of the bits at `positions`.
    pub fn parity_of(&self, positions: &[usize]) -> u8 {
        positions.iter().fold(0, |acc, &p| acc ^ self.get(p))
    }

    /// Bits at `positions`, in that order.
    pub fn select(&self, positions: &[usize]) -> BitString {
        positions.iter().map(|&p| self.get(p) != 0).collect()
    }

    /// Contiguous sub-string `[start, end)`.
    pub fn slice(&self, start: usize, end: usize) -> BitString {
        assert!(start <= end && end <= self.len, "bad slice {start}..{end} of {}", self.len);
        (start..end).map(|i| self.get(i) != 0).collect()
    }

    /// Packs MSB-first into bytes: bit 0 is the high bit of byte 0.
    pub fn to_bytes(&self) -> Vec<u8> {
        let mut out = vec![0u8; self.len.div_ceil(8)];
        for i in 0..self.len {
            if self.get(i) != 0 {
                out[i / 8] |= 0x80 >> (i % 8);
            }
        }
        out
    }

    /// Inverse of [`to_bytes`](Self::to_bytes). `None` if `bytes` is too short.
    pub fn from_bytes(bytes: &[u8], len: usize) -> Option<BitString> {
        if bytes.len() * 8 < len {
            return None;
        }
        Some((0..len).map(|i| bytes[i / 8] & (0x80 >> (i % 8)) != 0).collect())
    }

    pub fn to_hex(&self) -> String {
        hex::encode(self.to_bytes())
    }

    pub fn from_hex(s: &str, len: usize) -> Option<BitString> {
        let bytes = hex::decode(s).ok()?;
        Self::from_bytes(&bytes, len)
    }
}

fn tail_mask(len: usize) -> u64 {
    match len % 64 {
        0 => u64::MAX,
        r => (1u64 << r) - 1,
    }
}

impl FromIterator<bool> for BitString {
    fn from_iter<I: IntoIterator<Item = bool>>(iter: I) -> Self {
        let mut out = BitString::new();
        for b in iter {
            out.push(b as u8);
        }
        out
    }
}

impl std::str::FromStr for BitString {
    type Err = String;

    /// Parses a string of `0`/`1` characters; `_` and spaces are ignored.
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        s.chars()
            .filter(|c| *c != '_' && !c.is_whitespace())
            .map(|c| match c {
                '0' => Ok(false),
                '1' => Ok(true),
                other => Err(format!("invalid bit character {other:?}")),
            })
            .collect()
    }
}

impl fmt::Display for BitString {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for b in self.iter() {
            f.write_str(if b == 1 { "1" } else { "0" })?;
        }
        Ok(())
    }
}

impl fmt::Debug for BitString {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.len <= 128 {
            write!(f, "BitString({self})")
        } else {
            write!(f, "BitString(len={}, hex={})", self.len, self.to_hex())
        }
    }
}

#[derive(Serialize, Deserialize)]
struct HexBits {
    len: usize,
    hex: String,
}

impl Serialize for BitString {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        HexBits { len: self.len, hex: self.to_hex() }.serialize(serializer)
    }
}

impl<'de> Deserialize<'de> for BitString {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let raw = HexBits::deserialize(deserializer)?;
        BitString::from_hex(&raw.hex, raw.len)
            .ok_or_else(|| serde::de::Error::custom("hex payload shorter than declared length"))
    }
}
