use super::toeplitz::{toeplitz_hash, ToeplitzSeed};
use super::{same_length, PostprocessError};
use crate::bits::BitString;
use crate::channel::{payload, MessageKind, Party, PublicChannel};
use crate::rng::RandomStream;

pub const DEFAULT_TAG_BITS: usize = 64;

/// Compares `t`-bit Toeplitz tags of the two keys under a fresh public seed.
///
/// Equal keys always pass. Unequal keys pass with probability `2^-t` over
/// the seed. Alice's tag is the only key-dependent disclosure; Bob's tag is
/// a function of public data when the check passes.
pub fn verify_keys(
    key_a: &BitString,
    key_b: &BitString,
    tag_bits: usize,
    rng: &mut RandomStream,
    channel: &mut dyn PublicChannel,
) -> Result<bool, PostprocessError> {
    same_length(key_a, key_b)?;
    if tag_bits == 0 || key_a.is_empty() {
        return Err(PostprocessError::Domain(format!(
            "verification needs a non-empty key and tag (key {}, tag {tag_bits})",
            key_a.len()
        )));
    }

    let seed = ToeplitzSeed::random(key_a.len(), tag_bits, rng);
    let tag_a = toeplitz_hash(key_a, &seed, tag_bits)?;
    channel.send(Party::Alice, MessageKind::VfSeed, payload::encode_bits(seed.bits()));
    let sent_tag = channel.send(Party::Alice, MessageKind::VfTag, payload::encode_bits(&tag_a));
    let received_a = payload::decode_bits(sent_tag.payload()).ok_or(PostprocessError::Message("vf-tag"))?;

    let tag_b = toeplitz_hash(key_b, &seed, tag_bits)?;
    channel.send(Party::Bob, MessageKind::VfTag, payload::encode_bits(&tag_b));

    Ok(received_a == tag_b)
}
