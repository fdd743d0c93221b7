use super::ProtocolError;
use crate::bits::BitString;
use crate::channel::{payload, MessageKind, Party, PublicChannel};
use crate::quantum::Basis;
use crate::rng::RandomStream;

/// Minimum sifted length for parameter estimation; shorter runs abort.
pub const MIN_SIFTED_LEN: usize = 16;

#[derive(Debug, Clone, PartialEq)]
pub struct Sifted {
    pub a: BitString,
    pub b: BitString,
    /// Indices into the (loss-filtered) input lists that were kept.
    pub kept: Vec<usize>,
}

fn encode_bases(bases: &[Basis]) -> Result<Vec<u8>, ProtocolError> {
    let bits = bases
        .iter()
        .map(|b| match *b {
            Basis::Z => Ok(false),
            Basis::X => Ok(true),
            other => Err(ProtocolError::UnsupportedBasis(other.angle())),
        })
        .collect::<Result<BitString, _>>()?;
    Ok(payload::encode_bits(&bits))
}

fn decode_bases(payload: &[u8]) -> Result<BitString, ProtocolError> {
    payload::decode_bits(payload).ok_or(ProtocolError::Message("basis"))
}

/// Both parties announce their bases; positions with equal bases are kept.
pub fn sift(
    alice_bases: &[Basis],
    bob_bases: &[Basis],
    alice_bits: &BitString,
    bob_bits: &BitString,
    channel: &mut dyn PublicChannel,
) -> Result<Sifted, ProtocolError> {
    let n = alice_bases.len();
    for len in [bob_bases.len(), alice_bits.len(), bob_bits.len()] {
        if len != n {
            return Err(ProtocolError::LengthMismatch { left: n, right: len });
        }
    }
    let from_alice =
        decode_bases(channel.send(Party::Alice, MessageKind::Basis, encode_bases(alice_bases)?).payload())?;
    let from_bob = decode_bases(channel.send(Party::Bob, MessageKind::Basis, encode_bases(bob_bases)?).payload())?;
    let kept: Vec<usize> = (0..n).filter(|&i| from_alice.get(i) == from_bob.get(i)).collect();
    Ok(Sifted { a: alice_bits.select(&kept), b: bob_bits.select(&kept), kept })
}

#[derive(Debug, Clone, PartialEq)]
pub struct Estimate {
    pub qber_hat: f64,
    pub qber_upper: f64,
    pub errors: usize,
    /// Sifted positions that were published and removed from the key.
    pub test_positions: Vec<usize>,
    pub remaining_a: BitString,
    pub remaining_b: BitString,
}

/// One-sided Hoeffding deviation `√(ln(1/ε) / 2k)` for a sample of `k` bits.
pub fn hoeffding_margin(k: usize, eps_pe: f64) -> f64 {
    ((1.0 / eps_pe).ln() / (2.0 * k as f64)).sqrt()
}

/// Publishes a uniformly random `⌈f·len⌉`-subset of the sifted key and
/// bounds the error rate of the rest from it.
pub fn estimate_parameters(
    sifted_a: &BitString,
    sifted_b: &BitString,
    sample_fraction: f64,
    eps_pe: f64,
    rng: &mut RandomStream,
    channel: &mut dyn PublicChannel,
) -> Result<Estimate, ProtocolError> {
    let n = sifted_a.len();
    if sifted_b.len() != n {
        return Err(ProtocolError::LengthMismatch { left: n, right: sifted_b.len() });
    }
    if !(sample_fraction > 0.0 && sample_fraction < 1.0) || !(eps_pe > 0.0 && eps_pe < 1.0) {
        return Err(ProtocolError::Config(format!("sample_fraction {sample_fraction}, eps_pe {eps_pe}")));
    }
    if n < MIN_SIFTED_LEN {
        return Err(ProtocolError::InsufficientData { have: n, need: MIN_SIFTED_LEN });
    }
    let k = ((sample_fraction * n as f64).ceil() as usize).clamp(1, n);

    // Alice picks the sample by a partial Fisher-Yates shuffle.
    let mut pool: Vec<usize> = (0..n).collect();
    for i in 0..k {
        let j = i + rng.below(n - i);
        pool.swap(i, j);
    }
    let mut chosen = pool[..k].to_vec();
    chosen.sort_unstable();

    let announced = channel.send(Party::Alice, MessageKind::PeSample, payload::encode_indices(&chosen));
    let test_positions = payload::decode_indices(announced.payload()).ok_or(ProtocolError::Message("pe-sample"))?;
    let a_sample =
        channel.send(Party::Alice, MessageKind::PeBits, payload::encode_bits(&sifted_a.select(&test_positions)));
    let a_sample = payload::decode_bits(a_sample.payload()).ok_or(ProtocolError::Message("pe-bits"))?;
    let b_sample =
        channel.send(Party::Bob, MessageKind::PeBits, payload::encode_bits(&sifted_b.select(&test_positions)));
    let b_sample = payload::decode_bits(b_sample.payload()).ok_or(ProtocolError::Message("pe-bits"))?;

    let errors = a_sample.hamming(&b_sample).ok_or(ProtocolError::Message("pe-bits"))?;
    let qber_hat = errors as f64 / k as f64;
    let qber_upper = qber_hat + hoeffding_margin(k, eps_pe);

    let mut in_sample = vec![false; n];
    for &p in &test_positions {
        in_sample[p] = true;
    }
    let rest: Vec<usize> = (0..n).filter(|&i| !in_sample[i]).collect();
    Ok(Estimate {
        qber_hat,
        qber_upper,
        errors,
        test_positions,
        remaining_a: sifted_a.select(&rest),
        remaining_b: sifted_b.select(&rest),
    })
}
