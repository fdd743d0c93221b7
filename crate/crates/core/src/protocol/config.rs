use serde::{Deserialize, Serialize};

use super::ProtocolError;
use crate::channel::NoiseModel;
use crate::postprocess::DEFAULT_TAG_BITS;

/// Parameters of one key-generation session.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ProtocolConfig {
    pub n_rounds: usize,
    /// Abort when the upper bound on the error rate exceeds this.
    pub qber_threshold: f64,
    /// Fraction of sifted rounds sacrificed for parameter estimation.
    pub sample_fraction: f64,
    /// Failure probability of the error-rate bound.
    pub eps_pe: f64,
    pub eps_cor: f64,
    pub eps_sec: f64,
    /// Verification tag length; `2^-tag_bits` must not exceed `eps_cor`.
    pub tag_bits: usize,
    pub cascade_passes: usize,
    pub noise: NoiseModel,
    pub seed: u64,
}

impl Default for ProtocolConfig {
    fn default() -> Self {
        Self {
            n_rounds: 4096,
            qber_threshold: 0.11,
            sample_fraction: 0.5,
            eps_pe: 1e-6,
            eps_cor: 1e-12,
            eps_sec: 1e-9,
            tag_bits: DEFAULT_TAG_BITS,
            cascade_passes: 4,
            noise: NoiseModel::noiseless(),
            seed: 0,
        }
    }
}

fn open_unit(name: &str, v: f64) -> Result<(), ProtocolError> {
    if v > 0.0 && v < 1.0 {
        Ok(())
    } else {
        Err(ProtocolError::Config(format!("{name} = {v} must lie in (0, 1)")))
    }
}

impl ProtocolConfig {
    pub fn validate(&self) -> Result<(), ProtocolError> {
        if self.n_rounds == 0 {
            return Err(ProtocolError::Config("n_rounds must be positive".into()));
        }
        open_unit("qber_threshold", self.qber_threshold)?;
        open_unit("sample_fraction", self.sample_fraction)?;
        open_unit("eps_pe", self.eps_pe)?;
        open_unit("eps_cor", self.eps_cor)?;
        open_unit("eps_sec", self.eps_sec)?;
        if self.tag_bits == 0 || self.tag_bits > 1024 {
            return Err(ProtocolError::Config(format!("tag_bits = {} outside 1..=1024", self.tag_bits)));
        }
        if 2f64.powi(-(self.tag_bits as i32)) > self.eps_cor {
            return Err(ProtocolError::Config(format!(
                "a {}-bit tag cannot reach eps_cor = {:e}",
                self.tag_bits, self.eps_cor
            )));
        }
        if self.cascade_passes == 0 {
            return Err(ProtocolError::Config("cascade_passes must be positive".into()));
        }
        self.noise.validate().map_err(|e| ProtocolError::Config(e.to_string()))
    }

    /// `ε_QKD = ε_cor + ε_sec`.
    pub fn eps_qkd(&self) -> f64 {
        self.eps_cor + self.eps_sec
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn default_is_valid() {
        ProtocolConfig::default().validate().unwrap();
    }

    #[test]
    fn rejects_out_of_range() {
        let bad = |f: fn(&mut ProtocolConfig)| {
            let mut c = ProtocolConfig::default();
            f(&mut c);
            assert!(matches!(c.validate(), Err(ProtocolError::Config(_))), "{c:?}");
        };
        bad(|c| c.n_rounds = 0);
        bad(|c| c.sample_fraction = 1.0);
        bad(|c| c.qber_threshold = 0.0);
        bad(|c| c.eps_sec = 1.0);
        bad(|c| c.eps_cor = 1e-30);
        bad(|c| c.noise.p_x = 2.0);
        bad(|c| c.cascade_passes = 0);
    }

    #[test]
    fn json_mirrors_fields() {
        let c: ProtocolConfig = serde_json::from_str(r#"{"n_rounds": 100, "noise": {"p_x": 0.01}}"#).unwrap();
        assert_eq!(c.n_rounds, 100);
        assert_eq!(c.noise.p_x, 0.01);
        assert_eq!(c.qber_threshold, 0.11);
        assert!(serde_json::from_str::<ProtocolConfig>(r#"{"rounds": 1}"#).is_err());
    }
}
