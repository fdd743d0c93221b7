use serde::Serialize;

use crate::bits::BitString;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Stage {
    Raw,
    Sifted,
    Reconciled,
    Final,
}

/// A key string at one pipeline stage together with the number of bits
/// about it that have been disclosed publicly so far.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct KeyMaterial {
    stage: Stage,
    bits: BitString,
    leak_bits: usize,
}

impl KeyMaterial {
    pub fn raw(bits: BitString) -> Self {
        Self { stage: Stage::Raw, bits, leak_bits: 0 }
    }

    /// Moves to a later stage. Leakage only accumulates.
    pub fn advance(self, stage: Stage, bits: BitString, additional_leak: usize) -> Self {
        assert!(stage > self.stage, "cannot move from {:?} to {:?}", self.stage, stage);
        Self { stage, bits, leak_bits: self.leak_bits + additional_leak }
    }

    pub fn stage(&self) -> Stage {
        self.stage
    }

    pub fn bits(&self) -> &BitString {
        &self.bits
    }

    pub fn leak_bits(&self) -> usize {
        self.leak_bits
    }

    pub fn summary(&self) -> StageSummary {
        StageSummary { stage: self.stage, len: self.bits.len(), leak_bits: self.leak_bits }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct StageSummary {
    pub stage: Stage,
    pub len: usize,
    pub leak_bits: usize,
}
