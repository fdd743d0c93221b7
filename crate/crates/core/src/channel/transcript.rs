use std::io::{self, BufRead, Write};

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::bits::BitString;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Party {
    Alice,
    Bob,
}

/// Kind of a public classical message.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum MessageKind {
    /// Rounds the receiver never detected.
    Loss,
    /// Measurement bases, one bit per round (0 = Z, 1 = X).
    Basis,
    /// Positions sampled for error estimation.
    PeSample,
    /// A party's bits at the sampled positions.
    PeBits,
    /// Seed of the permutation used by a reconciliation pass.
    EcShuffle,
    /// Parities disclosed during reconciliation; each bit is leakage.
    EcParity,
    /// Receiver's request for a sub-block parity.
    EcQuery,
    VfSeed,
    VfTag,
    PaSeed,
}

/// One public message. Fields are read-only once created.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Entry {
    sender: Party,
    tag: MessageKind,
    payload: Vec<u8>,
}

impl Entry {
    pub fn sender(&self) -> Party {
        self.sender
    }

    pub fn tag(&self) -> MessageKind {
        self.tag
    }

    pub fn payload(&self) -> &[u8] {
        &self.payload
    }
}

#[derive(Serialize, Deserialize)]
struct EntryLine {
    sender: Party,
    tag: MessageKind,
    payload: String,
}

/// Append-only log of everything said on the public channel.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Transcript {
    entries: Vec<Entry>,
}

impl Transcript {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn append(&mut self, sender: Party, tag: MessageKind, payload: Vec<u8>) -> &Entry {
        self.entries.push(Entry { sender, tag, payload });
        self.entries.last().expect("just pushed")
    }

    pub fn entries(&self) -> &[Entry] {
        &self.entries
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn last(&self) -> Option<&Entry> {
        self.entries.last()
    }

    /// Entries matching a sender and tag.
    pub fn filter(&self, sender: Party, tag: MessageKind) -> impl Iterator<Item = &Entry> {
        self.entries.iter().filter(move |e| e.sender == sender && e.tag == tag)
    }

    /// JSON-lines: one `{"sender","tag","payload"}` object per entry, payload hex.
    pub fn write_jsonl<W: Write>(&self, mut w: W) -> io::Result<()> {
        for e in &self.entries {
            let line = EntryLine { sender: e.sender, tag: e.tag, payload: hex::encode(&e.payload) };
            serde_json::to_writer(&mut w, &line)?;
            w.write_all(b"\n")?;
        }
        Ok(())
    }

    pub fn to_jsonl(&self) -> String {
        let mut buf = Vec::new();
        self.write_jsonl(&mut buf).expect("writing to a Vec cannot fail");
        String::from_utf8(buf).expect("JSON is UTF-8")
    }

    pub fn read_jsonl<R: BufRead>(r: R) -> io::Result<Transcript> {
        let mut t = Transcript::new();
        for line in r.lines() {
            let line = line?;
            if line.trim().is_empty() {
                continue;
            }
            let parsed: EntryLine = serde_json::from_str(&line)?;
            let payload = hex::decode(&parsed.payload).map_err(|e| io::Error::new(io::ErrorKind::InvalidData, e))?;
            t.append(parsed.sender, parsed.tag, payload);
        }
        Ok(t)
    }

    /// SHA-256 of the JSON-lines encoding.
    pub fn digest_hex(&self) -> String {
        hex::encode(Sha256::digest(self.to_jsonl().as_bytes()))
    }
}

/// Receives a read-only copy of every public message as it is sent.
pub trait ClassicalObserver {
    fn on_classical(&mut self, entry: &Entry);
}

/// The authenticated public channel. Messages can be read by anyone but
/// arrive unmodified; there is no API to alter a sent entry.
pub trait PublicChannel {
    fn send(&mut self, sender: Party, tag: MessageKind, payload: Vec<u8>) -> &Entry;
    fn transcript(&self) -> &Transcript;
}

impl PublicChannel for Transcript {
    fn send(&mut self, sender: Party, tag: MessageKind, payload: Vec<u8>) -> &Entry {
        self.append(sender, tag, payload)
    }

    fn transcript(&self) -> &Transcript {
        self
    }
}

/// A channel whose traffic is also shown to an observer (the eavesdropper).
pub struct ObservedChannel<'a> {
    transcript: &'a mut Transcript,
    observer: &'a mut dyn ClassicalObserver,
}

impl<'a> ObservedChannel<'a> {
    pub fn new(transcript: &'a mut Transcript, observer: &'a mut dyn ClassicalObserver) -> Self {
        Self { transcript, observer }
    }
}

impl PublicChannel for ObservedChannel<'_> {
    fn send(&mut self, sender: Party, tag: MessageKind, payload: Vec<u8>) -> &Entry {
        let entry = self.transcript.append(sender, tag, payload);
        self.observer.on_classical(entry);
        entry
    }

    fn transcript(&self) -> &Transcript {
        self.transcript
    }
}

/// Appends a message and returns the entry as the receiver sees it.
pub fn send_classical(channel: &mut dyn PublicChannel, sender: Party, tag: MessageKind, payload: Vec<u8>) -> &Entry {
    channel.send(sender, tag, payload)
}

/// Payload encodings shared by the protocol messages.
pub mod payload {
    use super::BitString;

    /// 4-byte big-endian bit count followed by the MSB-first packed bits.
    pub fn encode_bits(bits: &BitString) -> Vec<u8> {
        let mut out = (bits.len() as u32).to_be_bytes().to_vec();
        out.extend(bits.to_bytes());
        out
    }

    pub fn decode_bits(payload: &[u8]) -> Option<BitString> {
        let len = u32::from_be_bytes(payload.get(..4)?.try_into().ok()?) as usize;
        BitString::from_bytes(&payload[4..], len)
    }

    /// Each value as a 4-byte big-endian integer.
    pub fn encode_indices(indices: &[usize]) -> Vec<u8> {
        indices.iter().flat_map(|&i| (i as u32).to_be_bytes()).collect()
    }

    pub fn decode_indices(payload: &[u8]) -> Option<Vec<usize>> {
        if !payload.len().is_multiple_of(4) {
            return None;
        }
        Some(payload.chunks_exact(4).map(|c| u32::from_be_bytes(c.try_into().expect("chunk of 4")) as usize).collect())
    }
}
