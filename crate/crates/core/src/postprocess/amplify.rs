use super::entropy::binary_entropy;
use super::toeplitz::{toeplitz_hash, ToeplitzSeed};
use super::PostprocessError;
use crate::bits::BitString;
use crate::channel::{payload, Entry, MessageKind, Party, PublicChannel};
use crate::rng::RandomStream;

/// Secret key length after privacy amplification:
///
/// `ℓ = max(0, ⌊n·(1 − h(Q⁺)) − leak_ec − t − 2·log₂(1/ε_sec)⌋)`
///
/// `n` is the number of key bits left after parameter estimation, `Q⁺` the
/// upper confidence bound on their error rate, `leak_ec` the parity bits
/// disclosed by reconciliation and `t` the verification tag length. The
/// `2·log₂(1/ε_sec)` term is the leftover-hash secrecy penalty used
/// throughout this crate.
pub fn final_length(
    n: usize,
    qber_upper: f64,
    leak_ec: usize,
    tag_bits: usize,
    eps_sec: f64,
) -> Result<usize, PostprocessError> {
    if !(0.0..=0.5).contains(&qber_upper) {
        return Err(PostprocessError::Domain(format!("error-rate bound {qber_upper} not in [0, 0.5]")));
    }
    if !(eps_sec > 0.0 && eps_sec < 1.0) {
        return Err(PostprocessError::Domain(format!("eps_sec {eps_sec} not in (0, 1)")));
    }
    let raw = n as f64 * (1.0 - binary_entropy(qber_upper)?)
        - leak_ec as f64
        - tag_bits as f64
        - 2.0 * (1.0 / eps_sec).log2();
    Ok(if raw <= 0.0 { 0 } else { raw.floor() as usize })
}

/// Alice's side of privacy amplification: draws and publishes a Toeplitz
/// seed, then compresses `key` to `out_len` bits. Bob recovers the seed
/// with [`read_published_seed`].
pub fn privacy_amplify(
    key: &BitString,
    out_len: usize,
    rng: &mut RandomStream,
    channel: &mut dyn PublicChannel,
) -> Result<(BitString, ToeplitzSeed), PostprocessError> {
    if out_len > key.len() {
        return Err(PostprocessError::Length { requested: out_len, available: key.len() });
    }
    let seed = ToeplitzSeed::random(key.len(), out_len, rng);
    channel.send(Party::Alice, MessageKind::PaSeed, payload::encode_bits(seed.bits()));
    let out = toeplitz_hash(key, &seed, out_len)?;
    Ok((out, seed))
}

/// Decodes a published privacy-amplification seed and the output length it
/// implies for a key of `key_len` bits.
pub fn read_published_seed(entry: &Entry, key_len: usize) -> Result<(ToeplitzSeed, usize), PostprocessError> {
    if entry.tag() != MessageKind::PaSeed {
        return Err(PostprocessError::Message("expected pa-seed"));
    }
    let bits = payload::decode_bits(entry.payload()).ok_or(PostprocessError::Message("pa-seed"))?;
    let out_len = if bits.is_empty() { 0 } else { bits.len() + 1 - key_len };
    Ok((ToeplitzSeed::new(bits), out_len))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::channel::Transcript;

    #[test]
    fn final_length_example() {
        // 10^4 − 64 − 2·log₂(10^6) = 9896.137
        assert_eq!(final_length(10_000, 0.0, 0, 64, 1e-6).unwrap(), 9896);
    }

    #[test]
    fn final_length_clamps_to_zero() {
        assert_eq!(final_length(10_000, 0.5, 0, 64, 1e-6).unwrap(), 0);
        assert_eq!(final_length(100, 0.0, 50, 64, 1e-6).unwrap(), 0);
    }

    #[test]
    fn final_length_domain() {
        assert!(final_length(100, 0.6, 0, 0, 1e-6).is_err());
        assert!(final_length(100, 0.1, 0, 0, 0.0).is_err());
        assert!(final_length(100, 0.1, 0, 0, 1.0).is_err());
    }

    #[test]
    fn final_length_strictly_decreases_with_eps() {
        let lens: Vec<_> =
            [1e-6, 1e-9, 1e-12].iter().map(|&e| final_length(10_000, 0.03, 2000, 64, e).unwrap()).collect();
        assert!(lens[0] > lens[1] && lens[1] > lens[2], "{lens:?}");
    }

    #[test]
    fn amplify_zero_length() {
        let mut rng = RandomStream::from_seed(1);
        let key = BitString::random(50, &mut rng);
        let mut tr = Transcript::new();
        let (out, seed) = privacy_amplify(&key, 0, &mut rng, &mut tr).unwrap();
        assert!(out.is_empty() && seed.is_empty());
        assert_eq!(read_published_seed(tr.last().unwrap(), 50).unwrap().1, 0);
    }

    #[test]
    fn both_parties_agree_through_published_seed() {
        let mut rng = RandomStream::from_seed(2);
        let key = BitString::random(300, &mut rng);
        let mut tr = Transcript::new();
        let (alice, _) = privacy_amplify(&key, 120, &mut rng, &mut tr).unwrap();
        let (seed, len) = read_published_seed(tr.last().unwrap(), key.len()).unwrap();
        assert_eq!(len, 120);
        assert_eq!(toeplitz_hash(&key, &seed, len).unwrap(), alice);
    }

    #[test]
    fn amplify_rejects_expansion() {
        let mut rng = RandomStream::from_seed(3);
        let err = privacy_amplify(&BitString::zeros(10), 11, &mut rng, &mut Transcript::new()).unwrap_err();
        assert_eq!(err, PostprocessError::Length { requested: 11, available: 10 });
    }
}
