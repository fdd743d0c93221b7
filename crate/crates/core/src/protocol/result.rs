use serde::{Serialize, Serializer};

use super::keys::StageSummary;
use crate::bits::BitString;
use crate::channel::Transcript;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum AbortReason {
    QberTooHigh,
    VerificationFailed,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RunStats {
    pub raw_len: usize,
    pub lost_rounds: usize,
    pub sifted_len: usize,
    pub sample_len: usize,
    pub remaining_len: usize,
    pub qber_estimate: f64,
    pub qber_upper: f64,
    pub leak_ec: usize,
    pub ec_corrections: usize,
    pub tag_bits: usize,
    pub final_len: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SuccessData {
    pub s_a: BitString,
    pub s_b: BitString,
    pub eps_qkd: f64,
    pub stats: RunStats,
    /// Alice's key length and cumulative leakage at each stage.
    pub stages: Vec<StageSummary>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(tag = "outcome", rename_all = "snake_case")]
pub enum Outcome {
    Aborted {
        reason: AbortReason,
        /// Sample error rate, when estimation got that far.
        qber_estimate: Option<f64>,
    },
    Success(Box<SuccessData>),
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ProtocolResult {
    #[serde(flatten)]
    pub outcome: Outcome,
    #[serde(serialize_with = "transcript_reference")]
    pub transcript: Transcript,
}

fn transcript_reference<S: Serializer>(t: &Transcript, s: S) -> Result<S::Ok, S::Error> {
    #[derive(Serialize)]
    struct Reference {
        entries: usize,
        sha256: String,
    }
    Reference { entries: t.len(), sha256: t.digest_hex() }.serialize(s)
}

impl ProtocolResult {
    pub fn is_success(&self) -> bool {
        matches!(self.outcome, Outcome::Success(_))
    }

    pub fn success(&self) -> Option<&SuccessData> {
        match &self.outcome {
            Outcome::Success(s) => Some(s),
            Outcome::Aborted { .. } => None,
        }
    }

    pub fn abort_reason(&self) -> Option<AbortReason> {
        match self.outcome {
            Outcome::Aborted { reason, .. } => Some(reason),
            Outcome::Success(_) => None,
        }
    }

    pub fn qber_estimate(&self) -> Option<f64> {
        match &self.outcome {
            Outcome::Aborted { qber_estimate, .. } => *qber_estimate,
            Outcome::Success(s) => Some(s.stats.qber_estimate),
        }
    }

    pub fn to_json(&self) -> serde_json::Value {
        serde_json::to_value(self).expect("result is always serializable")
    }
}
