//! The simulated quantum channel and the authenticated public channel.

mod quantum;
mod transcript;

pub use quantum::{transmit_qubit, NoiseError, NoiseModel, TransmitResult};
pub use transcript::{
    payload, send_classical, ClassicalObserver, Entry, MessageKind, ObservedChannel, Party, PublicChannel, Transcript,
};
