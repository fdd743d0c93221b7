//! Seeded Monte Carlo sweeps and the demonstration experiments.
//!
//! Every repetition runs with its own seed `derive_seed(base, [grid, rep])`,
//! so any row can be replayed from the base seed alone. Grid points run in
//! parallel; rows always come out in grid order.

use std::io::Write;
use std::str::FromStr;

use rayon::prelude::*;
use serde::Serialize;

use crate::adversary::{AdversaryError, BasisPolicy, EveKind, EveStrategy};
use crate::bits::BitString;
use crate::otp::{KeyLedger, OtpError};
use crate::protocol::{run_bb84_pm, run_protocol, ProtocolConfig, ProtocolError, ProtocolResult};
use crate::quantum::{
    apply_correction, cloning_signaling_demo, make_qubit, teleport, Basis, CloningError, Complex, QuantumError,
};
use crate::rng::{derive_seed, RandomStream};

#[derive(Debug, thiserror::Error)]
pub enum ExperimentError {
    #[error("invalid experiment: {0}")]
    Config(String),
    #[error(transparent)]
    Protocol(#[from] ProtocolError),
    #[error(transparent)]
    Adversary(#[from] AdversaryError),
    #[error(transparent)]
    Quantum(#[from] QuantumError),
    #[error(transparent)]
    Cloning(#[from] CloningError),
    #[error(transparent)]
    Otp(#[from] OtpError),
    #[error(transparent)]
    Csv(#[from] csv::Error),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum ExperimentKind {
    /// Grid: intercept-resend fraction `f` (random Z/X basis).
    QberVsEve,
    /// Grid: bit-flip probability `p_x` of the channel.
    KeyrateVsNoise,
    /// Grid: `eps_sec`.
    KeylenVsEps,
    RunOnce,
    TeleportDemo,
    CloningDemo,
    OtpDemo,
}

impl ExperimentKind {
    pub const ALL: [ExperimentKind; 7] = [
        Self::QberVsEve,
        Self::KeyrateVsNoise,
        Self::KeylenVsEps,
        Self::RunOnce,
        Self::TeleportDemo,
        Self::CloningDemo,
        Self::OtpDemo,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Self::QberVsEve => "qber-vs-eve",
            Self::KeyrateVsNoise => "keyrate-vs-noise",
            Self::KeylenVsEps => "keylen-vs-eps",
            Self::RunOnce => "run-once",
            Self::TeleportDemo => "teleport-demo",
            Self::CloningDemo => "cloning-demo",
            Self::OtpDemo => "otp-demo",
        }
    }

    pub fn is_sweep(self) -> bool {
        matches!(self, Self::QberVsEve | Self::KeyrateVsNoise | Self::KeylenVsEps)
    }
}

impl FromStr for ExperimentKind {
    type Err = ExperimentError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Self::ALL
            .into_iter()
            .find(|k| k.name() == s)
            .ok_or_else(|| ExperimentError::Config(format!("unknown experiment kind `{s}`")))
    }
}

#[derive(Debug, Clone)]
pub struct ExperimentSpec {
    pub kind: ExperimentKind,
    /// Sweep parameter values. For demos the first entry is the trial or
    /// copy count.
    pub grid: Vec<f64>,
    pub repetitions: usize,
    pub base_config: ProtocolConfig,
    /// Adversary for `run-once`, `keyrate-vs-noise` and `keylen-vs-eps`.
    pub eve: EveKind,
    /// Use the prepare-and-measure variant instead of the entangled source.
    pub prepare_measure: bool,
    /// Plaintext for `otp-demo`, in hex.
    pub message_hex: Option<String>,
}

impl ExperimentSpec {
    pub fn new(kind: ExperimentKind, grid: Vec<f64>, repetitions: usize, base_config: ProtocolConfig) -> Self {
        Self { kind, grid, repetitions, base_config, eve: EveKind::Passive, prepare_measure: false, message_hex: None }
    }

    pub fn validate(&self) -> Result<(), ExperimentError> {
        if self.repetitions == 0 {
            return Err(ExperimentError::Config("repetitions must be at least 1".into()));
        }
        if self.kind.is_sweep() && self.grid.is_empty() {
            return Err(ExperimentError::Config("grid must not be empty".into()));
        }
        if self.grid.iter().any(|v| !v.is_finite()) {
            return Err(ExperimentError::Config("grid values must be finite".into()));
        }
        self.base_config.validate()?;
        Ok(())
    }
}

/// One CSV row: statistics over the repetitions at one grid point.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Row {
    pub param: f64,
    pub grid_index: usize,
    pub base_seed: u64,
    pub reps: usize,
    /// Mean sample error rate over runs that reached estimation.
    pub qber_mean: Option<f64>,
    pub qber_std: Option<f64>,
    pub abort_rate: f64,
    /// Aborted runs count as length 0.
    pub final_len_mean: f64,
    /// Reconciliation leakage, averaged over successful runs.
    pub leak_mean: Option<f64>,
    pub eps_qkd: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct TeleportReport {
    pub trials: usize,
    /// Counts of Bell outcomes `(x, y)` in the order 00, 01, 10, 11.
    pub outcome_counts: [usize; 4],
    pub min_fidelity: f64,
    pub mean_fidelity: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct OtpReport {
    pub message_hex: String,
    pub message_bits: usize,
    pub key_bits: usize,
    pub ciphertext_hex: String,
    pub decrypted_hex: String,
    pub recovered: bool,
    pub key_remaining: usize,
}

#[derive(Debug, Clone)]
pub enum ExperimentOutput {
    Table(Vec<Row>),
    Json(serde_json::Value),
}

impl ExperimentOutput {
    pub fn rows(&self) -> Option<&[Row]> {
        match self {
            Self::Table(rows) => Some(rows),
            Self::Json(_) => None,
        }
    }
}

pub fn write_csv<W: Write>(rows: &[Row], out: W) -> Result<(), ExperimentError> {
    let mut w = csv::Writer::from_writer(out);
    for row in rows {
        w.serialize(row)?;
    }
    w.flush()?;
    Ok(())
}

pub fn to_csv_string(rows: &[Row]) -> Result<String, ExperimentError> {
    let mut buf = Vec::new();
    write_csv(rows, &mut buf)?;
    Ok(String::from_utf8(buf).expect("csv output is utf-8"))
}

pub fn run_experiment(spec: &ExperimentSpec) -> Result<ExperimentOutput, ExperimentError> {
    spec.validate()?;
    match spec.kind {
        ExperimentKind::QberVsEve | ExperimentKind::KeyrateVsNoise | ExperimentKind::KeylenVsEps => {
            let rows = spec
                .grid
                .par_iter()
                .enumerate()
                .map(|(i, &v)| sweep_point(spec, i, v))
                .collect::<Result<Vec<_>, _>>()?;
            Ok(ExperimentOutput::Table(rows))
        }
        ExperimentKind::RunOnce => {
            let result = run_single(spec, &spec.base_config, spec.eve)?;
            Ok(ExperimentOutput::Json(result.to_json()))
        }
        ExperimentKind::TeleportDemo => {
            let trials = demo_count(spec, 1000)?;
            let report = teleport_demo(trials, spec.base_config.seed)?;
            Ok(ExperimentOutput::Json(serde_json::to_value(report).expect("serializable")))
        }
        ExperimentKind::CloningDemo => {
            let copies = demo_count(spec, 1000)?;
            let mut rng = RandomStream::from_seed(spec.base_config.seed).substream("cloning");
            let z = cloning_signaling_demo(copies, Basis::Z, &mut rng)?;
            let x = cloning_signaling_demo(copies, Basis::X, &mut rng)?;
            Ok(ExperimentOutput::Json(serde_json::json!({ "alice_measures_z": z, "alice_measures_x": x })))
        }
        ExperimentKind::OtpDemo => {
            let hex = spec.message_hex.as_deref().unwrap_or("48656c6c6f");
            let report = otp_demo(spec, hex)?;
            Ok(ExperimentOutput::Json(serde_json::to_value(report).expect("serializable")))
        }
    }
}

fn demo_count(spec: &ExperimentSpec, default: usize) -> Result<usize, ExperimentError> {
    match spec.grid.first() {
        None => Ok(default),
        Some(&v) if v >= 1.0 && v.fract() == 0.0 => Ok(v as usize),
        Some(&v) => Err(ExperimentError::Config(format!("count must be a positive integer, got {v}"))),
    }
}

fn run_single(spec: &ExperimentSpec, config: &ProtocolConfig, eve: EveKind) -> Result<ProtocolResult, ExperimentError> {
    let mut eve = EveStrategy::new(eve)?;
    if spec.prepare_measure {
        Ok(run_bb84_pm(config, &mut eve)?)
    } else {
        Ok(run_protocol(config, &mut eve)?)
    }
}

fn sweep_point(spec: &ExperimentSpec, index: usize, value: f64) -> Result<Row, ExperimentError> {
    let base = spec.base_config.seed;
    let mut config = spec.base_config.clone();
    let mut eve = spec.eve;
    match spec.kind {
        ExperimentKind::QberVsEve => {
            eve = EveKind::InterceptResend { policy: BasisPolicy::RandomZX, fraction: value };
        }
        ExperimentKind::KeyrateVsNoise => config.noise.p_x = value,
        ExperimentKind::KeylenVsEps => config.eps_sec = value,
        _ => unreachable!("not a sweep"),
    }
    config.validate()?;

    let mut qbers = Vec::new();
    let mut leaks = Vec::new();
    let mut aborts = 0usize;
    let mut final_total = 0usize;
    for rep in 0..spec.repetitions {
        // The eps sweep reuses the same runs at every grid point so the
        // key-length curve reflects only the eps dependence.
        config.seed = match spec.kind {
            ExperimentKind::KeylenVsEps => derive_seed(base, &[0, rep as u64]),
            _ => derive_seed(base, &[index as u64, rep as u64]),
        };
        let result = run_single(spec, &config, eve)?;
        if let Some(q) = result.qber_estimate() {
            qbers.push(q);
        }
        match result.success() {
            Some(s) => {
                final_total += s.stats.final_len;
                leaks.push(s.stats.leak_ec as f64);
            }
            None => aborts += 1,
        }
    }
    let reps = spec.repetitions;
    Ok(Row {
        param: value,
        grid_index: index,
        base_seed: base,
        reps,
        qber_mean: mean(&qbers),
        qber_std: std_dev(&qbers),
        abort_rate: aborts as f64 / reps as f64,
        final_len_mean: final_total as f64 / reps as f64,
        leak_mean: mean(&leaks),
        eps_qkd: config.eps_qkd(),
    })
}

fn mean(xs: &[f64]) -> Option<f64> {
    (!xs.is_empty()).then(|| xs.iter().sum::<f64>() / xs.len() as f64)
}

/// Sample standard deviation; zero for a single observation.
fn std_dev(xs: &[f64]) -> Option<f64> {
    let m = mean(xs)?;
    if xs.len() < 2 {
        return Some(0.0);
    }
    let ss: f64 = xs.iter().map(|x| (x - m).powi(2)).sum();
    Some((ss / (xs.len() - 1) as f64).sqrt())
}

/// Teleports `trials` Haar-random qubits and checks each arrives intact.
pub fn teleport_demo(trials: usize, seed: u64) -> Result<TeleportReport, QuantumError> {
    let mut rng = RandomStream::from_seed(seed).substream("teleport");
    let mut outcome_counts = [0usize; 4];
    let mut min_fidelity = f64::INFINITY;
    let mut total = 0.0;
    for _ in 0..trials {
        let psi = random_qubit(&mut rng)?;
        let t = teleport(&psi, &mut rng)?;
        let fixed = apply_correction(&t.received, t.x, t.y)?;
        let f = psi.fidelity(&fixed)?;
        outcome_counts[(t.x * 2 + t.y) as usize] += 1;
        min_fidelity = min_fidelity.min(f);
        total += f;
    }
    Ok(TeleportReport {
        trials,
        outcome_counts,
        min_fidelity: if trials == 0 { 1.0 } else { min_fidelity },
        mean_fidelity: if trials == 0 { 1.0 } else { total / trials as f64 },
    })
}

/// A uniformly random pure qubit (Haar measure).
pub fn random_qubit(rng: &mut RandomStream) -> Result<crate::quantum::PureState, QuantumError> {
    let cos_theta = 2.0 * rng.uniform() - 1.0;
    let half = cos_theta.acos() / 2.0;
    let phi = rng.uniform() * std::f64::consts::TAU;
    make_qubit(Complex::new(half.cos(), 0.0), Complex::from_polar(half.sin(), phi))
}

/// Generates a key with the configured protocol and pads `message_hex` with it.
pub fn otp_demo(spec: &ExperimentSpec, message_hex: &str) -> Result<OtpReport, ExperimentError> {
    let message_bits = message_hex.len() * 4;
    let message = BitString::from_hex(message_hex, message_bits)
        .ok_or_else(|| ExperimentError::Config(format!("`{message_hex}` is not a hex string")))?;
    let result = run_single(spec, &spec.base_config, spec.eve)?;
    let success = result
        .success()
        .ok_or_else(|| ExperimentError::Config("key generation aborted; no key to encrypt with".into()))?;
    let mut alice = KeyLedger::new(success.s_a.clone());
    let mut bob = KeyLedger::new(success.s_b.clone());
    let ciphertext = alice.encrypt(&message)?;
    let decrypted = bob.decrypt(&ciphertext)?;
    Ok(OtpReport {
        message_hex: message.to_hex(),
        message_bits,
        key_bits: success.s_a.len(),
        ciphertext_hex: ciphertext.to_hex(),
        decrypted_hex: decrypted.to_hex(),
        recovered: decrypted == message,
        key_remaining: alice.remaining(),
    })
}
