//! Cascade-style interactive reconciliation.
//!
//! Pass 1 splits the key into blocks of `⌈0.73 / Q⌉` bits. Alice publishes
//! every block parity; for each block where Bob's parity differs, Bob
//! bisects by asking for the parity of the left half until a single wrong
//! bit is isolated and flipped. Later passes apply a public random
//! permutation and double the block size, up to a cap that keeps at least
//! eight blocks per pass. Each flip also toggles the parity
//! of the blocks holding that bit in every earlier pass, which queues them
//! for bisection again (the cascade step).
//!
//! Every parity Alice discloses is one bit of leakage.

use std::collections::VecDeque;

use super::{same_length, PostprocessError};
use crate::bits::BitString;
use crate::channel::{payload, Entry, MessageKind, Party, PublicChannel};
use crate::rng::RandomStream;

pub const BLOCK_SIZE_CONSTANT: f64 = 0.73;

/// Every pass uses at least this many blocks. A pass with one block only
/// sees the overall parity and can never locate an even number of errors.
pub const MIN_BLOCKS_PER_PASS: usize = 8;

#[derive(Debug, Clone, PartialEq)]
pub struct ReconciliationReport {
    /// Bob's key after correction.
    pub corrected: BitString,
    pub leak_bits: usize,
    pub passes: usize,
    pub parities_disclosed: usize,
    /// Number of bits Bob flipped.
    pub corrections: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Cascade {
    pub passes: usize,
}

impl Default for Cascade {
    fn default() -> Self {
        Self { passes: 4 }
    }
}

/// Public block structure of one pass.
struct Layout {
    order: Vec<usize>,
    block_size: usize,
    block_of: Vec<usize>,
}

impl Layout {
    fn new(order: Vec<usize>, block_size: usize) -> Self {
        let mut block_of = vec![0; order.len()];
        for (slot, &pos) in order.iter().enumerate() {
            block_of[pos] = slot / block_size;
        }
        Self { order, block_size, block_of }
    }

    fn blocks(&self) -> usize {
        self.order.len().div_ceil(self.block_size)
    }

    fn block(&self, j: usize) -> &[usize] {
        let start = j * self.block_size;
        &self.order[start..(start + self.block_size).min(self.order.len())]
    }
}

/// Alice's half of the exchange: she only ever answers parity queries.
struct AliceSide<'a> {
    key: &'a BitString,
}

impl AliceSide<'_> {
    fn block_parities(&self, layout: &Layout) -> BitString {
        (0..layout.blocks()).map(|j| self.key.parity_of(layout.block(j)) == 1).collect()
    }

    fn answer(&self, query: &Entry, layouts: &[Layout]) -> Result<BitString, PostprocessError> {
        let bad = PostprocessError::Message("ec-query");
        let q = payload::decode_indices(query.payload()).ok_or(bad.clone())?;
        let [pass, block, start, end] = q[..] else { return Err(bad) };
        let range = layouts.get(pass).and_then(|l| l.block(block).get(start..end)).ok_or(bad)?;
        Ok(BitString::from_bits(&[self.key.parity_of(range)]))
    }
}

pub fn initial_block_size(qber_hint: f64, len: usize) -> usize {
    let q = qber_hint.max(1.0 / len as f64);
    ((BLOCK_SIZE_CONSTANT / q).ceil() as usize).clamp(1, len.max(1))
}

fn shuffled(n: usize, seed: u64) -> Vec<usize> {
    let mut rng = RandomStream::from_seed(seed).substream("cascade-shuffle");
    let mut order: Vec<usize> = (0..n).collect();
    for i in (1..n).rev() {
        order.swap(i, rng.below(i + 1));
    }
    order
}

impl Cascade {
    pub fn new(passes: usize) -> Self {
        Self { passes }
    }

    pub fn reconcile(
        &self,
        key_a: &BitString,
        key_b: &BitString,
        qber_hint: f64,
        channel: &mut dyn PublicChannel,
        rng: &mut RandomStream,
    ) -> Result<ReconciliationReport, PostprocessError> {
        same_length(key_a, key_b)?;
        if !(0.0..0.5).contains(&qber_hint) {
            return Err(PostprocessError::Domain(format!("qber hint {qber_hint} not in [0, 0.5)")));
        }
        if self.passes == 0 {
            return Err(PostprocessError::Domain("cascade needs at least one pass".into()));
        }
        let n = key_a.len();
        let alice = AliceSide { key: key_a };
        let mut bob = key_b.clone();
        let mut disclosed = 0;
        let mut corrections = 0;
        if n == 0 {
            return Ok(ReconciliationReport {
                corrected: bob,
                leak_bits: 0,
                passes: self.passes,
                parities_disclosed: 0,
                corrections: 0,
            });
        }

        let first = initial_block_size(qber_hint, n);
        let mut layouts: Vec<Layout> = Vec::with_capacity(self.passes);
        // Bob's copy of Alice's top-level block parities, per pass.
        let mut top_parities: Vec<BitString> = Vec::with_capacity(self.passes);

        for pass in 0..self.passes {
            let order = if pass == 0 {
                (0..n).collect()
            } else {
                let sent = channel.send(Party::Alice, MessageKind::EcShuffle, rng.next_u64().to_be_bytes().to_vec());
                let seed =
                    u64::from_be_bytes(sent.payload().try_into().map_err(|_| PostprocessError::Message("ec-shuffle"))?);
                shuffled(n, seed)
            };
            let size = 1usize
                .checked_shl(pass as u32)
                .and_then(|m| first.checked_mul(m))
                .map_or(n, |s| s.min(n))
                .min(n.div_ceil(MIN_BLOCKS_PER_PASS));
            let layout = Layout::new(order, size);

            let sent =
                channel.send(Party::Alice, MessageKind::EcParity, payload::encode_bits(&alice.block_parities(&layout)));
            let parities = payload::decode_bits(sent.payload()).ok_or(PostprocessError::Message("ec-parity"))?;
            disclosed += parities.len();

            let mut queue: VecDeque<(usize, usize)> = (0..layout.blocks())
                .filter(|&j| bob.parity_of(layout.block(j)) != parities.get(j))
                .map(|j| (pass, j))
                .collect();
            layouts.push(layout);
            top_parities.push(parities);

            while let Some((p, j)) = queue.pop_front() {
                let alice_parity = top_parities[p].get(j);
                if bob.parity_of(layouts[p].block(j)) == alice_parity {
                    continue;
                }
                let pos = bisect(&alice, &bob, &layouts, p, j, alice_parity, channel, &mut disclosed)?;
                bob.flip(pos);
                corrections += 1;
                for (q, layout) in layouts.iter().enumerate() {
                    let b = layout.block_of[pos];
                    if (q, b) != (p, j) {
                        queue.push_back((q, b));
                    }
                }
            }
        }

        Ok(ReconciliationReport {
            corrected: bob,
            leak_bits: disclosed,
            passes: self.passes,
            parities_disclosed: disclosed,
            corrections,
        })
    }
}

/// Binary search for one error inside a block whose parities disagree.
#[allow(clippy::too_many_arguments)]
fn bisect(
    alice: &AliceSide<'_>,
    bob: &BitString,
    layouts: &[Layout],
    pass: usize,
    block: usize,
    mut alice_parity: u8,
    channel: &mut dyn PublicChannel,
    disclosed: &mut usize,
) -> Result<usize, PostprocessError> {
    let positions = layouts[pass].block(block);
    let (mut lo, mut hi) = (0, positions.len());
    while hi - lo > 1 {
        let mid = lo + (hi - lo) / 2;
        let query =
            channel.send(Party::Bob, MessageKind::EcQuery, payload::encode_indices(&[pass, block, lo, mid])).clone();
        let reply =
            channel.send(Party::Alice, MessageKind::EcParity, payload::encode_bits(&alice.answer(&query, layouts)?));
        let alice_left = payload::decode_bits(reply.payload())
            .filter(|b| b.len() == 1)
            .ok_or(PostprocessError::Message("ec-parity"))?
            .get(0);
        *disclosed += 1;
        if bob.parity_of(&positions[lo..mid]) != alice_left {
            hi = mid;
            alice_parity = alice_left;
        } else {
            lo = mid;
            alice_parity ^= alice_left;
        }
    }
    debug_assert_ne!(bob.get(positions[lo]), alice_parity);
    Ok(positions[lo])
}

/// [`Cascade::reconcile`] with the default four passes.
pub fn cascade_reconcile(
    key_a: &BitString,
    key_b: &BitString,
    qber_hint: f64,
    channel: &mut dyn PublicChannel,
    rng: &mut RandomStream,
) -> Result<ReconciliationReport, PostprocessError> {
    Cascade::default().reconcile(key_a, key_b, qber_hint, channel, rng)
}
