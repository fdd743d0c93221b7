//! One-time pad over a finite key, consumed front to back.

use crate::bits::BitString;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum OtpError {
    #[error("message needs {requested} key bits but only {remaining} remain")]
    KeyExhausted { requested: usize, remaining: usize },
}

/// Tracks which key bits have been used so no bit ever pads two messages.
#[derive(Debug, Clone)]
pub struct KeyLedger {
    key: BitString,
    consumed: usize,
}

impl KeyLedger {
    pub fn new(key: BitString) -> Self {
        Self { key, consumed: 0 }
    }

    pub fn remaining(&self) -> usize {
        self.key.len() - self.consumed
    }

    pub fn consumed(&self) -> usize {
        self.consumed
    }

    fn take(&mut self, len: usize) -> Result<BitString, OtpError> {
        if len > self.remaining() {
            return Err(OtpError::KeyExhausted { requested: len, remaining: self.remaining() });
        }
        let pad = self.key.slice(self.consumed, self.consumed + len);
        self.consumed += len;
        Ok(pad)
    }

    /// `C = M ⊕ K` using the next `|M|` unused key bits.
    pub fn encrypt(&mut self, message: &BitString) -> Result<BitString, OtpError> {
        let pad = self.take(message.len())?;
        Ok(message.xor(&pad).expect("pad has message length"))
    }

    /// Decryption is the same operation on the receiver's copy of the key.
    pub fn decrypt(&mut self, ciphertext: &BitString) -> Result<BitString, OtpError> {
        self.encrypt(ciphertext)
    }
}
