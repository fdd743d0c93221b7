use statrs::distribution::{ChiSquared, ContinuousCDF};

use qkdsim::channel::{NoiseModel, Transcript};
use qkdsim::protocol::{quantum_phase, run_protocol, ProtocolConfig, Scheme};
use qkdsim::quantum::Basis;
use qkdsim::EveStrategy;

fn config(n_rounds: usize, noise: NoiseModel, seed: u64) -> ProtocolConfig {
    ProtocolConfig { n_rounds, noise, seed, ..ProtocolConfig::default() }
}

#[test]
fn loss_independent_of_basis_and_bit() {
    let noise = NoiseModel { p_loss: 0.3, ..NoiseModel::noiseless() };
    let raw = quantum_phase(&config(100_000, noise, 21), Scheme::Entangled, &mut EveStrategy::passive()).unwrap();
    // rows: lost / detected; columns: Alice's (basis, bit)
    let mut table = [[0f64; 4]; 2];
    for i in 0..raw.detected.len() {
        let col = 2 * (raw.alice_bases[i] == Basis::X) as usize + raw.alice_bits.get(i) as usize;
        table[raw.detected[i] as usize][col] += 1.0;
    }
    let total: f64 = table.iter().flatten().sum();
    let mut chi2 = 0.0;
    for r in 0..2 {
        for c in 0..4 {
            let expected = table[r].iter().sum::<f64>() * (table[0][c] + table[1][c]) / total;
            chi2 += (table[r][c] - expected).powi(2) / expected;
        }
    }
    let p = 1.0 - ChiSquared::new(3.0).unwrap().cdf(chi2);
    assert!(p > 0.001, "chi2 {chi2}, p {p}");
    let loss = table[0].iter().sum::<f64>() / total;
    assert!((loss - 0.3).abs() < 0.01, "{loss}");
}

#[test]
fn bit_flip_noise_sets_z_qber() {
    let noise = NoiseModel { p_x: 0.05, p_y: 0.02, ..NoiseModel::noiseless() };
    let raw = quantum_phase(&config(100_000, noise, 22), Scheme::Entangled, &mut EveStrategy::passive()).unwrap();
    let z: Vec<usize> =
        (0..raw.detected.len()).filter(|&i| raw.alice_bases[i] == Basis::Z && raw.bob_bases[i] == Basis::Z).collect();
    let errors = z.iter().filter(|&&i| raw.alice_bits.get(i) != raw.bob_bits.get(i)).count();
    let q = errors as f64 / z.len() as f64;
    let expected = 0.07;
    let sigma = (expected * (1.0 - expected) / z.len() as f64).sqrt();
    assert!((q - expected).abs() <= 3.0 * sigma, "{q}");
}

#[test]
fn phase_noise_invisible_in_z() {
    let noise = NoiseModel { p_z: 0.2, ..NoiseModel::noiseless() };
    let raw = quantum_phase(&config(20_000, noise, 23), Scheme::Entangled, &mut EveStrategy::passive()).unwrap();
    for i in 0..raw.detected.len() {
        if raw.alice_bases[i] == Basis::Z && raw.bob_bases[i] == Basis::Z {
            assert_eq!(raw.alice_bits.get(i), raw.bob_bits.get(i));
        }
    }
}

#[test]
fn transcript_replay_is_byte_identical() {
    let noise = NoiseModel { p_x: 0.02, p_loss: 0.1, ..NoiseModel::noiseless() };
    let c = config(4096, noise, 24);
    let a = run_protocol(&c, &mut EveStrategy::passive()).unwrap();
    let b = run_protocol(&c, &mut EveStrategy::passive()).unwrap();
    assert_eq!(a.transcript.to_jsonl(), b.transcript.to_jsonl());
    let parsed = Transcript::read_jsonl(a.transcript.to_jsonl().as_bytes()).unwrap();
    assert_eq!(parsed, a.transcript);

    let other = run_protocol(&ProtocolConfig { seed: 25, ..c }, &mut EveStrategy::passive()).unwrap();
    assert_ne!(other.transcript.digest_hex(), a.transcript.digest_hex());
}
