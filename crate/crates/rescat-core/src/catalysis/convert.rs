//! Two-way converters between catalytic dilations and broadcasting channels.

use serde::{Deserialize, Serialize};

use crate::channel::constructors::trace_and_prepare;
use crate::channel::QuantumChannel;
use crate::error::{Error, Result};
use crate::qmat::{ComplexMatrix, DensityMatrix};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ConvertDirection {
    /// B(•_C) = Λ(γ_S ⊗ •_C): feed the dilation a fixed free system state.
    CatalysisToBroadcast,
    /// Λ = B ∘ Tr_S: discard the system, then broadcast.
    BroadcastToCatalysis,
}

/// Convert between the two channel forms. `gamma` plays the role of the free
/// system state: for catalysis→broadcast it is fed into the dilation, for
/// broadcast→catalysis its factorization defines the discarded system.
///
/// Round trip: converting a broadcaster to a dilation and back yields a
/// channel with identical action on every input (B ∘ Tr_S absorbs γ into a
/// trace), and a dilation round trip agrees on all inputs of the form γ ⊗ τ.
pub fn convert(
    direction: ConvertDirection,
    channel: &QuantumChannel,
    gamma: &DensityMatrix,
) -> Result<QuantumChannel> {
    match direction {
        ConvertDirection::CatalysisToBroadcast => catalysis_to_broadcast(channel, gamma),
        ConvertDirection::BroadcastToCatalysis => trace_and_prepare(channel, gamma.fact.clone()),
    }
}

fn catalysis_to_broadcast(
    lambda: &QuantumChannel,
    gamma: &DensityMatrix,
) -> Result<QuantumChannel> {
    let g_labels: Vec<&str> = gamma.labels().iter().map(|s| s.as_str()).collect();
    let g_pos = lambda.in_fact.positions_of(&g_labels)?;
    if g_pos.len() != g_labels.len() {
        return Err(Error::InvalidInput("duplicate system labels".into()));
    }
    let c_pos: Vec<usize> = (0..lambda.in_fact.subsystems())
        .filter(|p| !g_pos.contains(p))
        .collect();
    if c_pos.is_empty() {
        return Err(Error::InvalidInput("dilation input is all system".into()));
    }
    let g_fact = lambda.in_fact.select(&g_pos);
    if g_fact.dims() != gamma.fact.dims() {
        return Err(Error::DimensionMismatch {
            expected: g_fact.total_dim(),
            got: gamma.dim(),
        });
    }
    let c_fact = lambda.in_fact.select(&c_pos);
    let gamma_aligned = crate::channel::permute_to_label_order(
        &gamma.mat,
        &gamma.fact,
        g_fact.labels(),
    )?;

    // Kraus of the preparation ρ_C ↦ γ ⊗ ρ_C with γ embedded by position
    let eig = crate::qmat::eigh(&gamma_aligned, 1e-9)?;
    let d_full = lambda.in_fact.total_dim();
    let d_c = c_fact.total_dim();
    let mut prep_kraus = Vec::new();
    for (k, &lam) in eig.values.iter().enumerate() {
        if lam <= 1e-12 {
            continue;
        }
        let u = eig.vectors.column(k);
        let mut kr = ComplexMatrix::zeros(d_full, d_c);
        for full in 0..d_full {
            let fi = lambda.in_fact.decode(full);
            let gi: Vec<usize> = g_pos.iter().map(|&p| fi[p]).collect();
            let ci: Vec<usize> = c_pos.iter().map(|&p| fi[p]).collect();
            let g_idx = g_fact.encode(&gi);
            let c_idx = c_fact.encode(&ci);
            kr.set(full, c_idx, u[g_idx].scale(lam.sqrt()));
        }
        prep_kraus.push(kr);
    }
    let prepare = QuantumChannel::new(prep_kraus, c_fact, lambda.in_fact.clone())?;
    lambda.compose(&prepare)
}
