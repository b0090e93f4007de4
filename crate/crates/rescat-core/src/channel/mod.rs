//! CPTP maps with subsystem-aware application and validation.
//!
//! Kraus families are the primary representation; the Choi matrix is derived
//! on demand for complete-positivity checks and for extracting a Kraus form
//! of an induced (reduced) channel.
//!
//! ```
//! # extern crate rescat_core;
//! use rescat_core::channel::{constructors, induced_channel};
//! use rescat_core::qmat::DensityMatrix;
//!
//! // the qutrit ⊗ qubit catalytic swap, validated as a channel
//! let lambda = constructors::swap_catalytic()?;
//! let report = lambda.validate_cptp(1e-9)?;
//! assert!(report.cp_ok && report.tp_ok);
//!
//! // reducing it by the matched catalyst gives the induced map on S
//! let tau = DensityMatrix::from_probs(&[5.0 / 13.0, 8.0 / 13.0], "C")?;
//! let reduced = induced_channel(&lambda, &tau)?;
//! assert_eq!(reduced.in_dim(), 3);
//! assert!(reduced.validate_cptp(1e-8)?.cp_ok);
//! # Ok::<(), rescat_core::Error>(())
//! ```

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::qmat::{
    basis_ket, eigh, outer, partial_trace_mat, product_on_positions, Complex64, ComplexMatrix,
    DensityMatrix, Factorization,
};

/// Eigenvalues of a Choi matrix below this threshold are treated as
/// numerically null when extracting Kraus operators.
pub const KRAUS_CUTOFF: f64 = 1e-11;

/// CPTP map stored as a Kraus family with declared input/output
/// factorizations. Kraus operators have shape d_out × d_in.
#[derive(Debug, Clone)]
pub struct QuantumChannel {
    pub kraus: Vec<ComplexMatrix>,
    pub in_fact: Factorization,
    pub out_fact: Factorization,
}

/// Choi matrix of a channel, ordered input ⊗ output.
#[derive(Debug, Clone)]
pub struct ChoiMatrix {
    pub mat: ComplexMatrix,
    pub in_fact: Factorization,
    pub out_fact: Factorization,
}

/// Validation report for a channel.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct CptpReport {
    pub cp_ok: bool,
    pub tp_ok: bool,
    /// Smallest Choi eigenvalue.
    pub cp_margin: f64,
    /// Largest entry of |ΣK†K − I|.
    pub tp_margin: f64,
}

impl QuantumChannel {
    pub fn new(
        kraus: Vec<ComplexMatrix>,
        in_fact: Factorization,
        out_fact: Factorization,
    ) -> Result<Self> {
        if kraus.is_empty() {
            return Err(Error::InvalidChannel("empty Kraus family".into()));
        }
        let d_in = in_fact.total_dim();
        let d_out = out_fact.total_dim();
        for k in &kraus {
            if k.rows != d_out || k.cols != d_in {
                return Err(Error::InvalidChannel(format!(
                    "Kraus shape {}x{} does not match declared {}x{}",
                    k.rows, k.cols, d_out, d_in
                )));
            }
        }
        Ok(Self {
            kraus,
            in_fact,
            out_fact,
        })
    }

    pub fn in_dim(&self) -> usize {
        self.in_fact.total_dim()
    }

    pub fn out_dim(&self) -> usize {
        self.out_fact.total_dim()
    }

    /// Apply to a raw operator (no state validation): Σ K X K†.
    pub fn apply_mat(&self, x: &ComplexMatrix) -> ComplexMatrix {
        let mut out = ComplexMatrix::zeros(self.out_dim(), self.out_dim());
        for k in &self.kraus {
            out = out.add(&k.matmul(x).matmul(&k.adjoint()));
        }
        out
    }

    /// Apply to a density matrix. The input factorization must carry the same
    /// subsystem dimensions as the channel input.
    pub fn apply(&self, rho: &DensityMatrix) -> Result<DensityMatrix> {
        if rho.fact.dims() != self.in_fact.dims() {
            return Err(Error::DimensionMismatch {
                expected: self.in_dim(),
                got: rho.dim(),
            });
        }
        let out = self.apply_mat(&rho.mat);
        DensityMatrix::with_tols(
            out,
            self.out_fact.clone(),
            rho.herm_tol.max(1e-9),
            rho.psd_tol.max(1e-9),
            rho.trace_tol.max(1e-9),
        )
        .map_err(|e| match e {
            Error::NotPsd { min_eig, tol } => Error::InvalidChannel(format!(
                "channel output violates positivity (min eigenvalue {min_eig:.3e}, tol {tol:.3e})"
            )),
            other => other,
        })
    }

    /// Choi matrix J = Σ_ij |i⟩⟨j| ⊗ Λ(|i⟩⟨j|), input ⊗ output ordering.
    pub fn choi(&self) -> ChoiMatrix {
        let d_in = self.in_dim();
        let d_out = self.out_dim();
        let d = d_in * d_out;
        let mut mat = ComplexMatrix::zeros(d, d);
        for k in &self.kraus {
            // vec[i * d_out + a] = K[a][i]
            let mut v = vec![Complex64::new(0.0, 0.0); d];
            for i in 0..d_in {
                for a in 0..d_out {
                    v[i * d_out + a] = k.get(a, i);
                }
            }
            mat = mat.add(&outer(&v, &v));
        }
        ChoiMatrix {
            mat,
            in_fact: self.in_fact.clone(),
            out_fact: self.out_fact.clone(),
        }
    }

    /// Σ K†K, which must equal the identity for a trace-preserving map.
    pub fn kraus_gram(&self) -> ComplexMatrix {
        let mut sum = ComplexMatrix::zeros(self.in_dim(), self.in_dim());
        for k in &self.kraus {
            sum = sum.add(&k.adjoint().matmul(k));
        }
        sum
    }

    /// CP/TP validation: cp_ok iff the Choi matrix is PSD within tol, tp_ok
    /// iff ‖ΣK†K − I‖_max ≤ tol.
    pub fn validate_cptp(&self, tol: f64) -> Result<CptpReport> {
        let tp_margin = self
            .kraus_gram()
            .sub(&ComplexMatrix::identity(self.in_dim()))
            .max_abs();
        let choi = self.choi();
        let cp_margin = eigh(&choi.mat, 1e-7)?.min_value();
        Ok(CptpReport {
            cp_ok: cp_margin >= -tol,
            tp_ok: tp_margin <= tol,
            cp_margin,
            tp_margin,
        })
    }

    /// Sequential composition self ∘ other (other runs first).
    pub fn compose(&self, other: &QuantumChannel) -> Result<QuantumChannel> {
        if other.out_fact.dims() != self.in_fact.dims() {
            return Err(Error::DimensionMismatch {
                expected: self.in_dim(),
                got: other.out_dim(),
            });
        }
        let mut kraus = Vec::with_capacity(self.kraus.len() * other.kraus.len());
        for a in &self.kraus {
            for b in &other.kraus {
                kraus.push(a.matmul(b));
            }
        }
        QuantumChannel::new(kraus, other.in_fact.clone(), self.out_fact.clone())
    }

    /// Parallel composition self ⊗ other.
    pub fn tensor(&self, other: &QuantumChannel) -> Result<QuantumChannel> {
        let in_fact = self.in_fact.concat(&other.in_fact)?;
        let out_fact = self.out_fact.concat(&other.out_fact)?;
        let mut kraus = Vec::with_capacity(self.kraus.len() * other.kraus.len());
        for a in &self.kraus {
            for b in &other.kraus {
                kraus.push(a.kron(b));
            }
        }
        QuantumChannel::new(kraus, in_fact, out_fact)
    }

    /// Convex mixture Σ w_k Λ_k of channels with identical signatures.
    pub fn mixture(channels: &[(f64, QuantumChannel)]) -> Result<QuantumChannel> {
        let first = &channels
            .first()
            .ok_or_else(|| Error::InvalidChannel("empty mixture".into()))?
            .1;
        let mut kraus = Vec::new();
        for (w, ch) in channels {
            if *w < -1e-12 {
                return Err(Error::InvalidChannel("negative mixture weight".into()));
            }
            if ch.in_fact.dims() != first.in_fact.dims()
                || ch.out_fact.dims() != first.out_fact.dims()
            {
                return Err(Error::InvalidChannel("mixture signature mismatch".into()));
            }
            for k in &ch.kraus {
                kraus.push(k.scale_re(w.max(0.0).sqrt()));
            }
        }
        QuantumChannel::new(kraus, first.in_fact.clone(), first.out_fact.clone())
    }
}

impl ChoiMatrix {
    /// Extract a Kraus family, discarding eigenvalues below [`KRAUS_CUTOFF`].
    pub fn to_kraus(&self) -> Result<Vec<ComplexMatrix>> {
        let d_in = self.in_fact.total_dim();
        let d_out = self.out_fact.total_dim();
        let eig = eigh(&self.mat, 1e-7)?;
        let mut kraus = Vec::new();
        for (idx, &lam) in eig.values.iter().enumerate() {
            if lam <= KRAUS_CUTOFF {
                continue;
            }
            let v = eig.vectors.column(idx);
            let mut k = ComplexMatrix::zeros(d_out, d_in);
            let s = lam.sqrt();
            for i in 0..d_in {
                for a in 0..d_out {
                    k.set(a, i, v[i * d_out + a].scale(s));
                }
            }
            kraus.push(k);
        }
        if kraus.is_empty() {
            return Err(Error::InvalidChannel("Choi matrix is numerically null".into()));
        }
        Ok(kraus)
    }

    pub fn to_channel(&self) -> Result<QuantumChannel> {
        QuantumChannel::new(self.to_kraus()?, self.in_fact.clone(), self.out_fact.clone())
    }
}

/// Reduce a dilation Λ: SC → S'C by a fixed catalyst τ on C:
/// the induced map ρ_S ↦ Tr_C[Λ(ρ_S ⊗ τ_C)], returned in Kraus form.
///
/// The subsystems of τ identify C by label in both the input and output
/// factorizations of Λ; the remaining labels form S and S'.
pub fn induced_channel(lambda: &QuantumChannel, tau: &DensityMatrix) -> Result<QuantumChannel> {
    let c_labels: Vec<&str> = tau.labels().iter().map(|s| s.as_str()).collect();
    let in_c_pos = lambda.in_fact.positions_of(&c_labels)?;
    if in_c_pos.len() != c_labels.len() {
        return Err(Error::InvalidInput("duplicate catalyst labels".into()));
    }
    lambda.out_fact.positions_of(&c_labels)?;

    let in_s_pos: Vec<usize> = (0..lambda.in_fact.subsystems())
        .filter(|p| !in_c_pos.contains(p))
        .collect();
    if in_s_pos.is_empty() {
        return Err(Error::InvalidInput(
            "dilation input has no system subsystem besides the catalyst".into(),
        ));
    }
    let in_s_fact = lambda.in_fact.select(&in_s_pos);
    let in_c_fact = lambda.in_fact.select(&in_c_pos);
    if in_c_fact.dims() != tau.fact.dims() {
        return Err(Error::DimensionMismatch {
            expected: in_c_fact.total_dim(),
            got: tau.dim(),
        });
    }
    let tau_mat = permute_to_label_order(&tau.mat, &tau.fact, in_c_fact.labels())?;

    let out_s_labels: Vec<&str> = lambda
        .out_fact
        .labels()
        .iter()
        .filter(|l| !c_labels.contains(&l.as_str()))
        .map(|l| l.as_str())
        .collect();
    let out_s_pos = lambda.out_fact.positions_of(&out_s_labels)?;
    let out_s_fact = lambda.out_fact.select(&out_s_pos);

    let d_s = in_s_fact.total_dim();
    let d_out = out_s_fact.total_dim();
    let dim = d_s * d_out;
    let mut choi = ComplexMatrix::zeros(dim, dim);
    for i in 0..d_s {
        for j in 0..d_s {
            let e_ij = outer(&basis_ket(d_s, i), &basis_ket(d_s, j));
            let x = product_on_positions(&lambda.in_fact, &e_ij, &in_s_pos, &tau_mat, &in_c_pos);
            let y = lambda.apply_mat(&x);
            let m = partial_trace_mat(&y, &lambda.out_fact, &out_s_labels)?;
            for a in 0..d_out {
                for b in 0..d_out {
                    let v = choi.get(i * d_out + a, j * d_out + b) + m.get(a, b);
                    choi.set(i * d_out + a, j * d_out + b, v);
                }
            }
        }
    }
    ChoiMatrix {
        mat: choi,
        in_fact: in_s_fact,
        out_fact: out_s_fact,
    }
    .to_channel()
}

/// Reorder the subsystems of an operator to a new label order.
pub fn permute_to_label_order(
    mat: &ComplexMatrix,
    fact: &Factorization,
    new_order: &[String],
) -> Result<ComplexMatrix> {
    if new_order == fact.labels() {
        return Ok(mat.clone());
    }
    let perm: Vec<usize> = new_order
        .iter()
        .map(|l| fact.position(l))
        .collect::<Result<_>>()?;
    if perm.len() != fact.subsystems() {
        return Err(Error::InvalidInput("label order must be a permutation".into()));
    }
    let new_fact = fact.select(&perm);
    let d = fact.total_dim();
    let mut out = ComplexMatrix::zeros(d, d);
    for i in 0..d {
        let ni = new_fact.decode(i);
        let mut oi = vec![0usize; perm.len()];
        for (slot, &p) in perm.iter().enumerate() {
            oi[p] = ni[slot];
        }
        let oi_flat = fact.encode(&oi);
        for j in 0..d {
            let nj = new_fact.decode(j);
            let mut oj = vec![0usize; perm.len()];
            for (slot, &p) in perm.iter().enumerate() {
                oj[p] = nj[slot];
            }
            out.set(i, j, mat.get(oi_flat, fact.encode(&oj)));
        }
    }
    Ok(out)
}

pub mod constructors;
pub mod json;

pub use constructors::*;
pub use json::ChannelJson;

#[cfg(test)]
mod tests;
