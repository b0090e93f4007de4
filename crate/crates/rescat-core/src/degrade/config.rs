//! JSON configuration for simulator runs and the serialized run manifest.

use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use super::{NoiseKind, NoiseModel, Schedule};
use crate::catalysis::builtin_example;
use crate::channel::{ChannelJson, QuantumChannel};
use crate::error::{Error, Result};
use crate::qmat::{DensityMatrix, MatrixJson, RawMatrixJson};

/// Noise block of a simulation config.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum NoiseConfig {
    None,
    SystemPrepShift {
        direction: RawMatrixJson,
        epsilon: f64,
        schedule: Schedule,
    },
    CatalystPrepShift {
        epsilon: f64,
    },
    ChannelMix {
        weight: f64,
    },
}

/// Simulation configuration: either a builtin example name or explicit
/// channel/catalyst/input blocks, plus the noise model and seed.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SimConfig {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub builtin: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub channel: Option<ChannelJson>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub catalyst: Option<MatrixJson>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub nominal_input: Option<MatrixJson>,
    pub noise: NoiseConfig,
    #[serde(default)]
    pub seed: u64,
}

impl SimConfig {
    /// Materialize the run pieces: dilation, catalyst, nominal input, noise.
    pub fn build(&self) -> Result<(QuantumChannel, DensityMatrix, DensityMatrix, NoiseModel)> {
        let (channel, catalyst, nominal) = match (&self.builtin, &self.channel) {
            (Some(name), None) => {
                let ex = builtin_example(name)?;
                let catalyst = match &self.catalyst {
                    Some(m) => m.to_state()?,
                    None => ex.catalyst,
                };
                let nominal = match &self.nominal_input {
                    Some(m) => m.to_state()?,
                    None => ex.nominal_input,
                };
                (ex.dilation, catalyst, nominal)
            }
            (None, Some(ch)) => {
                let catalyst = self
                    .catalyst
                    .as_ref()
                    .ok_or_else(|| Error::InvalidInput("config needs a catalyst".into()))?
                    .to_state()?;
                let nominal = self
                    .nominal_input
                    .as_ref()
                    .ok_or_else(|| Error::InvalidInput("config needs a nominal_input".into()))?
                    .to_state()?;
                (ch.to_channel()?, catalyst, nominal)
            }
            _ => {
                return Err(Error::InvalidInput(
                    "config must set exactly one of builtin or channel".into(),
                ))
            }
        };
        let kind = match &self.noise {
            NoiseConfig::None => NoiseKind::None,
            NoiseConfig::SystemPrepShift {
                direction,
                epsilon,
                schedule,
            } => NoiseKind::SystemPrepShift {
                direction: direction.matrix()?,
                epsilon: *epsilon,
                schedule: *schedule,
            },
            NoiseConfig::CatalystPrepShift { epsilon } => NoiseKind::CatalystPrepShift {
                epsilon: *epsilon,
            },
            NoiseConfig::ChannelMix { weight } => NoiseKind::ChannelMix { weight: *weight },
        };
        Ok((
            channel,
            catalyst,
            nominal,
            NoiseModel {
                kind,
                seed: self.seed,
            },
        ))
    }

    /// Run manifest: seed and noise parameters, for reproducibility.
    pub fn manifest(&self, rounds: usize) -> Value {
        json!({
            "seed": self.seed,
            "rounds": rounds,
            "noise": serde_json::to_value(&self.noise).unwrap_or(Value::Null),
            "builtin": self.builtin,
        })
    }
}
