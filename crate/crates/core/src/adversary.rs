//! Eavesdropper strategies and ground-truth accounting of what Eve learns.
//!
//! The records kept here are simulator-side bookkeeping. The protocol
//! parties never read them; they only see the public transcript and the
//! statistics of their own measurement outcomes.

use std::fmt;
use std::str::FromStr;

use crate::bits::BitString;
use crate::channel::{ClassicalObserver, Entry};
use crate::quantum::{Basis, PureState, QuantumError};
use crate::rng::RandomStream;

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum BasisPolicy {
    /// Z or X with probability 1/2 each, per intercepted round.
    RandomZX,
    Fixed(Basis),
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum EveKind {
    Passive,
    InterceptResend {
        policy: BasisPolicy,
        fraction: f64,
    },
    /// Measures every round in a Z/X guess drawn from a stream seeded with
    /// `seed`, independent of the session seed.
    GuessAllBases {
        seed: u64,
    },
}

/// What Eve did to one delivered round.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EveRecord {
    pub round: usize,
    pub intercepted: bool,
    pub basis: Option<Basis>,
    pub bit: Option<u8>,
}

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum AdversaryError {
    #[error("intercept fraction {0} is not in [0, 1]")]
    Fraction(f64),
    #[error("cannot parse eavesdropper strategy {0:?}")]
    Parse(String),
}

#[derive(Debug)]
pub struct EveStrategy {
    kind: EveKind,
    records: Vec<EveRecord>,
    guesses: Option<RandomStream>,
    classical_view: Vec<Entry>,
}

impl EveStrategy {
    pub fn new(kind: EveKind) -> Result<Self, AdversaryError> {
        if let EveKind::InterceptResend { fraction, .. } = kind {
            if !(0.0..=1.0).contains(&fraction) {
                return Err(AdversaryError::Fraction(fraction));
            }
        }
        let mut eve = Self { kind, records: Vec::new(), guesses: None, classical_view: Vec::new() };
        eve.begin_session();
        Ok(eve)
    }

    pub fn passive() -> Self {
        Self::new(EveKind::Passive).expect("passive is always valid")
    }

    pub fn intercept_resend(policy: BasisPolicy, fraction: f64) -> Result<Self, AdversaryError> {
        Self::new(EveKind::InterceptResend { policy, fraction })
    }

    pub fn guess_all(seed: u64) -> Self {
        Self::new(EveKind::GuessAllBases { seed }).expect("always valid")
    }

    pub fn kind(&self) -> EveKind {
        self.kind
    }

    /// Clears all per-session state. Called at the start of every protocol run.
    pub fn begin_session(&mut self) {
        self.records.clear();
        self.classical_view.clear();
        self.guesses = match self.kind {
            EveKind::GuessAllBases { seed } => Some(RandomStream::from_seed(seed).substream("eve-guess")),
            _ => None,
        };
    }

    pub fn records(&self) -> &[EveRecord] {
        &self.records
    }

    /// Every public message Eve has observed this session.
    pub fn classical_view(&self) -> &[Entry] {
        &self.classical_view
    }

    /// Interacts with the last qubit of `state`, which is in transit.
    pub fn on_qubit(
        &mut self,
        state: &PureState,
        round: usize,
        rng: &mut RandomStream,
    ) -> Result<PureState, QuantumError> {
        let basis = match self.kind {
            EveKind::Passive => None,
            EveKind::InterceptResend { policy, fraction } => {
                if rng.bernoulli(fraction) {
                    Some(match policy {
                        BasisPolicy::RandomZX => random_zx(rng),
                        BasisPolicy::Fixed(b) => b,
                    })
                } else {
                    None
                }
            }
            EveKind::GuessAllBases { .. } => {
                Some(random_zx(self.guesses.as_mut().expect("guess stream set by begin_session")))
            }
        };
        let Some(basis) = basis else {
            self.records.push(EveRecord { round, intercepted: false, basis: None, bit: None });
            return Ok(state.clone());
        };
        let outcome = state.measure(state.num_qubits() - 1, basis, rng)?;
        self.records.push(EveRecord { round, intercepted: true, basis: Some(basis), bit: Some(outcome.bit) });
        // Ideal resend: the collapsed eigenstate continues to the receiver.
        Ok(outcome.post_state)
    }

    fn record_for(&self, round: usize) -> Option<&EveRecord> {
        self.records.binary_search_by_key(&round, |r| r.round).ok().map(|i| &self.records[i])
    }

    /// Fraction of sifted positions whose key bit Eve knows exactly: she
    /// intercepted, used the sifted basis, and recorded Alice's bit.
    ///
    /// `rounds`, `bases` and `alice_bits` describe the sifted key position by
    /// position (original round index, agreed basis, Alice's bit).
    pub fn eve_knowledge(&self, rounds: &[usize], bases: &[Basis], alice_bits: &BitString) -> f64 {
        assert_eq!(rounds.len(), bases.len());
        assert_eq!(rounds.len(), alice_bits.len());
        if rounds.is_empty() {
            return 0.0;
        }
        let known = rounds
            .iter()
            .zip(bases)
            .enumerate()
            .filter(|(i, (&round, &basis))| {
                self.record_for(round)
                    .is_some_and(|r| r.intercepted && r.basis == Some(basis) && r.bit == Some(alice_bits.get(*i)))
            })
            .count();
        known as f64 / rounds.len() as f64
    }

    /// Whether Eve's basis matched Alice's in every one of `rounds`.
    pub fn guessed_all_bases(&self, rounds: &[usize], alice_bases: &[Basis]) -> bool {
        rounds.iter().zip(alice_bases).all(|(&round, &b)| self.record_for(round).is_some_and(|r| r.basis == Some(b)))
    }
}

fn random_zx(rng: &mut RandomStream) -> Basis {
    if rng.bit() == 0 {
        Basis::Z
    } else {
        Basis::X
    }
}

impl ClassicalObserver for EveStrategy {
    fn on_classical(&mut self, entry: &Entry) {
        self.classical_view.push(entry.clone());
    }
}

fn parse_basis(s: &str) -> Option<Basis> {
    match s {
        "Z" | "z" => Some(Basis::Z),
        "X" | "x" => Some(Basis::X),
        _ => s.strip_suffix("deg").and_then(|d| d.parse().ok()).map(Basis::from_degrees),
    }
}

impl FromStr for EveStrategy {
    type Err = AdversaryError;

    /// `passive`, `intercept:<random|Z|X|<deg>deg>:<fraction>`, `guessall:<seed>`.
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let bad = || AdversaryError::Parse(s.to_string());
        let parts: Vec<&str> = s.trim().split(':').collect();
        match parts.as_slice() {
            ["passive"] => Ok(Self::passive()),
            ["intercept", policy, fraction] => {
                let fraction: f64 = fraction.parse().map_err(|_| bad())?;
                let policy = match *policy {
                    "random" => BasisPolicy::RandomZX,
                    other => BasisPolicy::Fixed(parse_basis(other).ok_or_else(bad)?),
                };
                Self::intercept_resend(policy, fraction)
            }
            ["guessall", seed] => Ok(Self::guess_all(seed.parse().map_err(|_| bad())?)),
            _ => Err(bad()),
        }
    }
}

impl fmt::Display for EveStrategy {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.kind {
            EveKind::Passive => write!(f, "passive"),
            EveKind::InterceptResend { policy, fraction } => {
                let p = match policy {
                    BasisPolicy::RandomZX => "random".to_string(),
                    BasisPolicy::Fixed(b) if b == Basis::Z || b == Basis::X => b.label(),
                    BasisPolicy::Fixed(b) => format!("{}deg", b.angle().to_degrees()),
                };
                write!(f, "intercept:{p}:{fraction}")
            }
            EveKind::GuessAllBases { seed } => write!(f, "guessall:{seed}"),
        }
    }
}
