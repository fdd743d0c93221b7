//! One key-generation session: quantum phase, then the classical
//! post-processing pipeline over the public channel.
//!
//! Alice's and Bob's data are kept in separate values and combined only
//! through messages on the transcript. Each party, the source, the channel
//! and the eavesdropper draw from their own random substream of the session
//! seed.

use super::config::ProtocolConfig;
use super::keys::{KeyMaterial, Stage};
use super::result::{AbortReason, Outcome, ProtocolResult, RunStats, SuccessData};
use super::sift::{estimate_parameters, sift};
use super::ProtocolError;
use crate::adversary::EveStrategy;
use crate::bits::BitString;
use crate::channel::{
    payload, transmit_qubit, MessageKind, ObservedChannel, Party, PublicChannel, Transcript, TransmitResult,
};
use crate::postprocess::{final_length, privacy_amplify, read_published_seed, toeplitz_hash, verify_keys, Cascade};
use crate::quantum::{bell_phi, measure_pair, Basis};
use crate::rng::RandomStream;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Scheme {
    /// A source emits `(|00⟩+|11⟩)/√2`; Alice keeps qubit 0, qubit 1 travels to Bob.
    Entangled,
    /// Alice prepares a Z/X eigenstate of a random bit and sends it to Bob.
    PrepareMeasure,
}

/// Test hook for exercising abort paths.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Fault {
    /// Flip Bob's reconciled bit at this index (mod key length) before verification.
    FlipReconciledBit(usize),
}

/// Everything both labs hold after the quantum phase, per round.
#[derive(Debug, Clone, PartialEq)]
pub struct RawRecords {
    pub alice_bases: Vec<Basis>,
    pub alice_bits: BitString,
    pub bob_bases: Vec<Basis>,
    /// Zero for undetected rounds.
    pub bob_bits: BitString,
    pub detected: Vec<bool>,
}

/// The rounds that survived loss, with their original round indices.
#[derive(Debug, Clone, PartialEq)]
pub struct Delivered {
    pub rounds: Vec<usize>,
    pub alice_bases: Vec<Basis>,
    pub alice_bits: BitString,
    pub bob_bases: Vec<Basis>,
    pub bob_bits: BitString,
}

impl RawRecords {
    pub fn lost_rounds(&self) -> Vec<usize> {
        (0..self.detected.len()).filter(|&i| !self.detected[i]).collect()
    }

    /// Drops the rounds listed in `lost` (which must be sorted).
    pub fn without(&self, lost: &[usize]) -> Delivered {
        let rounds: Vec<usize> = (0..self.detected.len()).filter(|i| lost.binary_search(i).is_err()).collect();
        Delivered {
            alice_bases: rounds.iter().map(|&i| self.alice_bases[i]).collect(),
            alice_bits: self.alice_bits.select(&rounds),
            bob_bases: rounds.iter().map(|&i| self.bob_bases[i]).collect(),
            bob_bits: self.bob_bits.select(&rounds),
            rounds,
        }
    }

    pub fn delivered(&self) -> Delivered {
        self.without(&self.lost_rounds())
    }
}

struct Streams {
    alice: RandomStream,
    bob: RandomStream,
    source: RandomStream,
    channel: RandomStream,
    eve: RandomStream,
}

impl Streams {
    fn new(root: &RandomStream) -> Self {
        Self {
            alice: root.substream("alice"),
            bob: root.substream("bob"),
            source: root.substream("source"),
            channel: root.substream("channel"),
            eve: root.substream("eve"),
        }
    }
}

fn random_zx(rng: &mut RandomStream) -> Basis {
    if rng.bit() == 0 {
        Basis::Z
    } else {
        Basis::X
    }
}

/// Runs the quantum phase only: distribution, transmission and measurement.
///
/// Resets `eve` for a new session.
pub fn quantum_phase(
    config: &ProtocolConfig,
    scheme: Scheme,
    eve: &mut EveStrategy,
) -> Result<RawRecords, ProtocolError> {
    config.validate()?;
    eve.begin_session();
    let root = RandomStream::from_seed(config.seed);
    quantum_phase_with(config, scheme, eve, &mut Streams::new(&root))
}

fn quantum_phase_with(
    config: &ProtocolConfig,
    scheme: Scheme,
    eve: &mut EveStrategy,
    s: &mut Streams,
) -> Result<RawRecords, ProtocolError> {
    let n = config.n_rounds;
    let mut raw = RawRecords {
        alice_bases: Vec::with_capacity(n),
        alice_bits: BitString::zeros(n),
        bob_bases: Vec::with_capacity(n),
        bob_bits: BitString::zeros(n),
        detected: Vec::with_capacity(n),
    };
    for round in 0..n {
        let a_basis = random_zx(&mut s.alice);
        let b_basis = random_zx(&mut s.bob);
        raw.alice_bases.push(a_basis);
        raw.bob_bases.push(b_basis);
        match scheme {
            Scheme::Entangled => {
                let sent = transmit_qubit(&bell_phi(), &config.noise, eve, round, &mut s.channel, &mut s.eve)?;
                match sent {
                    TransmitResult::Delivered(state) => {
                        let (a, b) = measure_pair(&state, a_basis, b_basis, &mut s.source)?;
                        raw.alice_bits.set(round, a);
                        raw.bob_bits.set(round, b);
                        raw.detected.push(true);
                    }
                    TransmitResult::Lost => {
                        // Alice still measures her half: a uniform bit.
                        let a = bell_phi().measure(0, a_basis, &mut s.source)?.bit;
                        raw.alice_bits.set(round, a);
                        raw.detected.push(false);
                    }
                }
            }
            Scheme::PrepareMeasure => {
                let bit = s.alice.bit();
                raw.alice_bits.set(round, bit);
                let sent = transmit_qubit(&a_basis.state(bit), &config.noise, eve, round, &mut s.channel, &mut s.eve)?;
                match sent {
                    TransmitResult::Delivered(state) => {
                        raw.bob_bits.set(round, state.measure(0, b_basis, &mut s.source)?.bit);
                        raw.detected.push(true);
                    }
                    TransmitResult::Lost => raw.detected.push(false),
                }
            }
        }
    }
    Ok(raw)
}

/// Configurable runner; [`run_protocol`] and [`run_bb84_pm`] cover the
/// usual cases.
#[derive(Debug, Clone)]
pub struct Session {
    config: ProtocolConfig,
    scheme: Scheme,
    fault: Option<Fault>,
}

impl Session {
    pub fn new(config: ProtocolConfig, scheme: Scheme) -> Self {
        Self { config, scheme, fault: None }
    }

    pub fn with_fault(mut self, fault: Fault) -> Self {
        self.fault = Some(fault);
        self
    }

    pub fn run(&self, eve: &mut EveStrategy) -> Result<ProtocolResult, ProtocolError> {
        let config = &self.config;
        config.validate()?;
        eve.begin_session();
        let root = RandomStream::from_seed(config.seed);
        let raw = quantum_phase_with(config, self.scheme, eve, &mut Streams::new(&root))?;

        let mut transcript = Transcript::new();
        let outcome = {
            let mut channel = ObservedChannel::new(&mut transcript, eve);
            self.classical_phase(&raw, &root, &mut channel)?
        };
        Ok(ProtocolResult { outcome, transcript })
    }

    fn classical_phase(
        &self,
        raw: &RawRecords,
        root: &RandomStream,
        channel: &mut dyn PublicChannel,
    ) -> Result<Outcome, ProtocolError> {
        let config = &self.config;
        let aborted = |reason, qber_estimate| Ok(Outcome::Aborted { reason, qber_estimate });

        // Bob announces undetected rounds; both sides drop them.
        let sent = channel.send(Party::Bob, MessageKind::Loss, payload::encode_indices(&raw.lost_rounds()));
        let lost = payload::decode_indices(sent.payload()).ok_or(ProtocolError::Message("loss"))?;
        let delivered = raw.without(&lost);

        let alice_key = KeyMaterial::raw(delivered.alice_bits.clone());
        let sifted =
            sift(&delivered.alice_bases, &delivered.bob_bases, &delivered.alice_bits, &delivered.bob_bits, channel)?;
        let alice_key = alice_key.advance(Stage::Sifted, sifted.a.clone(), 0);
        let mut stages = vec![alice_key.summary()];

        let mut pe_rng = root.substream("pe");
        let estimate = match estimate_parameters(
            &sifted.a,
            &sifted.b,
            config.sample_fraction,
            config.eps_pe,
            &mut pe_rng,
            channel,
        ) {
            Ok(e) => e,
            Err(ProtocolError::InsufficientData { .. }) => return aborted(AbortReason::QberTooHigh, None),
            Err(e) => return Err(e),
        };
        if estimate.qber_upper > config.qber_threshold {
            return aborted(AbortReason::QberTooHigh, Some(estimate.qber_hat));
        }

        let remaining = estimate.remaining_a.len();
        let (bob_key, leak_ec, corrections) = if remaining == 0 {
            (estimate.remaining_b.clone(), 0, 0)
        } else {
            let report = Cascade::new(config.cascade_passes).reconcile(
                &estimate.remaining_a,
                &estimate.remaining_b,
                estimate.qber_hat.min(0.49),
                channel,
                &mut root.substream("ec"),
            )?;
            (report.corrected, report.leak_bits, report.corrections)
        };
        let mut bob_key = bob_key;
        if let (Some(Fault::FlipReconciledBit(i)), false) = (self.fault, bob_key.is_empty()) {
            bob_key.flip(i % bob_key.len());
        }

        let tag_bits = if remaining == 0 { 0 } else { config.tag_bits };
        if remaining > 0 {
            let accepted = verify_keys(&estimate.remaining_a, &bob_key, tag_bits, &mut root.substream("vf"), channel)?;
            if !accepted {
                return aborted(AbortReason::VerificationFailed, Some(estimate.qber_hat));
            }
        }
        let alice_key = alice_key.advance(Stage::Reconciled, estimate.remaining_a.clone(), leak_ec + tag_bits);
        stages.push(alice_key.summary());

        let final_len = final_length(remaining, estimate.qber_upper.min(0.5), leak_ec, tag_bits, config.eps_sec)?;
        let (s_a, _) = privacy_amplify(alice_key.bits(), final_len, &mut root.substream("pa"), channel)?;
        let published = channel.transcript().last().ok_or(ProtocolError::Message("pa-seed"))?;
        let (seed, bob_len) = read_published_seed(published, bob_key.len())?;
        let s_b = toeplitz_hash(&bob_key, &seed, bob_len)?;
        let alice_key = alice_key.advance(Stage::Final, s_a.clone(), 0);
        stages.push(alice_key.summary());

        Ok(Outcome::Success(Box::new(SuccessData {
            s_a,
            s_b,
            eps_qkd: config.eps_qkd(),
            stats: RunStats {
                raw_len: config.n_rounds,
                lost_rounds: lost.len(),
                sifted_len: sifted.a.len(),
                sample_len: estimate.test_positions.len(),
                remaining_len: remaining,
                qber_estimate: estimate.qber_hat,
                qber_upper: estimate.qber_upper,
                leak_ec,
                ec_corrections: corrections,
                tag_bits,
                final_len,
            },
            stages,
        })))
    }
}

/// Entanglement-based protocol: distribute, measure, sift, estimate,
/// reconcile, verify, amplify.
pub fn run_protocol(config: &ProtocolConfig, eve: &mut EveStrategy) -> Result<ProtocolResult, ProtocolError> {
    Session::new(config.clone(), Scheme::Entangled).run(eve)
}

/// Prepare-and-measure variant with the same classical pipeline.
pub fn run_bb84_pm(config: &ProtocolConfig, eve: &mut EveStrategy) -> Result<ProtocolResult, ProtocolError> {
    Session::new(config.clone(), Scheme::PrepareMeasure).run(eve)
}
