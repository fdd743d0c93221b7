use serde::{Deserialize, Serialize};

use crate::adversary::EveStrategy;
use crate::quantum::{Pauli, PureState, QuantumError};
use crate::rng::RandomStream;

/// Pauli noise and loss on the in-transit qubit.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct NoiseModel {
    pub p_x: f64,
    pub p_y: f64,
    pub p_z: f64,
    pub p_loss: f64,
}

impl Default for NoiseModel {
    fn default() -> Self {
        Self::noiseless()
    }
}

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
#[error("invalid noise model: {0}")]
pub struct NoiseError(pub String);

impl NoiseModel {
    pub const fn noiseless() -> Self {
        Self { p_x: 0.0, p_y: 0.0, p_z: 0.0, p_loss: 0.0 }
    }

    pub fn bit_flip(p: f64) -> Self {
        Self { p_x: p, ..Self::noiseless() }
    }

    /// Each of X, Y, Z with probability `p / 3`.
    pub fn depolarizing(p: f64) -> Self {
        Self { p_x: p / 3.0, p_y: p / 3.0, p_z: p / 3.0, p_loss: 0.0 }
    }

    pub fn validate(&self) -> Result<(), NoiseError> {
        for (name, p) in [("p_x", self.p_x), ("p_y", self.p_y), ("p_z", self.p_z), ("p_loss", self.p_loss)] {
            if !(0.0..=1.0).contains(&p) {
                return Err(NoiseError(format!("{name} = {p} is not a probability")));
            }
        }
        let total = self.p_x + self.p_y + self.p_z;
        if total > 1.0 + 1e-12 {
            return Err(NoiseError(format!("p_x + p_y + p_z = {total} exceeds 1")));
        }
        Ok(())
    }

    /// Samples the Pauli error for one transmission.
    pub fn sample(&self, rng: &mut RandomStream) -> Option<Pauli> {
        if self.p_x + self.p_y + self.p_z == 0.0 {
            return None;
        }
        let u = rng.uniform();
        if u < self.p_x {
            Some(Pauli::X)
        } else if u < self.p_x + self.p_y {
            Some(Pauli::Y)
        } else if u < self.p_x + self.p_y + self.p_z {
            Some(Pauli::Z)
        } else {
            None
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum TransmitResult {
    Delivered(PureState),
    Lost,
}

/// Sends the last qubit of `state` through the channel.
///
/// Order of effects: loss, then the eavesdropper's interaction, then Pauli
/// noise. Lost rounds never reach the eavesdropper.
pub fn transmit_qubit(
    state: &PureState,
    noise: &NoiseModel,
    eve: &mut EveStrategy,
    round: usize,
    channel_rng: &mut RandomStream,
    eve_rng: &mut RandomStream,
) -> Result<TransmitResult, QuantumError> {
    if channel_rng.bernoulli(noise.p_loss) {
        return Ok(TransmitResult::Lost);
    }
    let transit = state.num_qubits() - 1;
    let attacked = eve.on_qubit(state, round, eve_rng)?;
    let delivered = match noise.sample(channel_rng) {
        Some(p) => attacked.apply_pauli(transit, p)?,
        None => attacked,
    };
    Ok(TransmitResult::Delivered(delivered))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::quantum::{bell_phi, measure_pair, Basis};

    fn send(noise: NoiseModel, seed: u64) -> TransmitResult {
        let mut eve = EveStrategy::passive();
        let mut ch = RandomStream::from_seed(seed);
        let mut er = RandomStream::from_seed(seed + 1);
        transmit_qubit(&bell_phi(), &noise, &mut eve, 0, &mut ch, &mut er).unwrap()
    }

    #[test]
    fn noiseless_passive_is_identity() {
        assert_eq!(send(NoiseModel::noiseless(), 1), TransmitResult::Delivered(bell_phi()));
    }

    #[test]
    fn full_bit_flip_anticorrelates_z() {
        let mut rng = RandomStream::from_seed(2);
        for seed in 0..200 {
            let TransmitResult::Delivered(s) = send(NoiseModel::bit_flip(1.0), seed) else {
                panic!("unexpected loss");
            };
            let (a, b) = measure_pair(&s, Basis::Z, Basis::Z, &mut rng).unwrap();
            assert_ne!(a, b);
        }
    }

    #[test]
    fn full_loss_loses_everything() {
        let noise = NoiseModel { p_loss: 1.0, ..NoiseModel::noiseless() };
        assert!((0..100).all(|s| send(noise, s) == TransmitResult::Lost));
    }

    #[test]
    fn validation() {
        assert!(NoiseModel::depolarizing(0.3).validate().is_ok());
        assert!(NoiseModel { p_x: 0.6, p_z: 0.6, ..NoiseModel::noiseless() }.validate().is_err());
        assert!(NoiseModel { p_loss: -0.1, ..NoiseModel::noiseless() }.validate().is_err());
    }
}
