//! Seeded, deterministic simulation of entanglement-based quantum key
//! distribution: qubit states, a noisy and possibly eavesdropped channel, the
//! classical post-processing pipeline and one-time-pad use of the result.

pub mod adversary;
pub mod bits;
pub mod channel;
pub mod experiment;
pub mod otp;
pub mod postprocess;
pub mod protocol;
pub mod quantum;
pub mod rng;

pub use adversary::{BasisPolicy, EveKind, EveStrategy};
pub use bits::BitString;
pub use otp::{KeyLedger, OtpError};
pub use protocol::{run_bb84_pm, run_protocol, AbortReason, ProtocolConfig, ProtocolError, ProtocolResult};
pub use rng::RandomStream;
