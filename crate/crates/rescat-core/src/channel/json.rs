//! Channel JSON format: kind + dims + labels + Kraus family.

use serde::{Deserialize, Serialize};

use super::QuantumChannel;
use crate::error::Result;
use crate::qmat::{Factorization, RawMatrixJson};

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ChannelJson {
    pub kind: String,
    pub in_dims: Vec<usize>,
    pub in_labels: Vec<String>,
    pub out_dims: Vec<usize>,
    pub out_labels: Vec<String>,
    pub kraus: Vec<RawMatrixJson>,
}

impl ChannelJson {
    pub fn from_channel(kind: &str, ch: &QuantumChannel) -> Self {
        Self {
            kind: kind.to_string(),
            in_dims: ch.in_fact.dims().to_vec(),
            in_labels: ch.in_fact.labels().to_vec(),
            out_dims: ch.out_fact.dims().to_vec(),
            out_labels: ch.out_fact.labels().to_vec(),
            kraus: ch.kraus.iter().map(RawMatrixJson::from_matrix).collect(),
        }
    }

    pub fn to_channel(&self) -> Result<QuantumChannel> {
        let in_fact = Factorization::new(self.in_dims.clone(), self.in_labels.clone())?;
        let out_fact = Factorization::new(self.out_dims.clone(), self.out_labels.clone())?;
        let kraus = self
            .kraus
            .iter()
            .map(|k| k.matrix())
            .collect::<Result<Vec<_>>>()?;
        QuantumChannel::new(kraus, in_fact, out_fact)
    }
}
