//! Channel constructors used throughout the catalysis and broadcasting
//! examples.

use super::QuantumChannel;
use crate::error::{Error, Result};
use crate::qmat::{
    basis_ket, is_unitary, outer, Complex64, ComplexMatrix, DensityMatrix, Factorization,
};

/// Identity channel on a factorization.
pub fn identity(fact: Factorization) -> Result<QuantumChannel> {
    let d = fact.total_dim();
    QuantumChannel::new(vec![ComplexMatrix::identity(d)], fact.clone(), fact)
}

/// Unitary channel ρ ↦ UρU†. Fails if `u` is not unitary within 1e-9.
pub fn unitary(
    u: ComplexMatrix,
    in_fact: Factorization,
    out_fact: Factorization,
) -> Result<QuantumChannel> {
    if !is_unitary(&u, 1e-9) {
        return Err(Error::InvalidChannel("matrix is not unitary".into()));
    }
    if u.rows != in_fact.total_dim() || u.rows != out_fact.total_dim() {
        return Err(Error::DimensionMismatch {
            expected: in_fact.total_dim(),
            got: u.rows,
        });
    }
    QuantumChannel::new(vec![u], in_fact, out_fact)
}

/// Permutation unitary over the computational basis: |i⟩ ↦ |perm\[i\]⟩.
pub fn permutation_unitary(perm: &[usize], fact: Factorization) -> Result<QuantumChannel> {
    let d = fact.total_dim();
    if perm.len() != d {
        return Err(Error::DimensionMismatch {
            expected: d,
            got: perm.len(),
        });
    }
    let mut m = ComplexMatrix::zeros(d, d);
    for (src, &dst) in perm.iter().enumerate() {
        if dst >= d {
            return Err(Error::InvalidInput(format!("permutation target {dst} out of range")));
        }
        m.set(dst, src, Complex64::new(1.0, 0.0));
    }
    unitary(m, fact.clone(), fact)
}

/// CNOT on two qubits with the control on the *second* subsystem:
/// |s, c⟩ ↦ |s ⊕ c, c⟩.
pub fn cnot(fact: Factorization) -> Result<QuantumChannel> {
    if fact.dims() != [2, 2] {
        return Err(Error::InvalidInput("cnot expects a 2x2 factorization".into()));
    }
    // flat index = 2s + c
    permutation_unitary(&[0, 3, 2, 1], fact)
}

/// Full SWAP of two equal-dimensional subsystems.
pub fn swap(fact: Factorization) -> Result<QuantumChannel> {
    let dims = fact.dims();
    if dims.len() != 2 || dims[0] != dims[1] {
        return Err(Error::InvalidInput("swap expects two equal subsystems".into()));
    }
    let d = dims[0];
    let mut perm = vec![0usize; d * d];
    for a in 0..d {
        for b in 0..d {
            perm[a * d + b] = b * d + a;
        }
    }
    permutation_unitary(&perm, fact)
}

/// The qutrit ⊗ qubit catalytic swap: exchanges the eigenstate pairs
/// (1,1)↔(2,2) and (2,1)↔(3,2) in 1-indexed labels, all other basis states
/// fixed. Catalytic exactly at diag(p) with (p₁+p₂)q₁ = (p₂+p₃)q₂.
pub fn swap_catalytic() -> Result<QuantumChannel> {
    let fact = Factorization::new(vec![3, 2], vec!["S".into(), "C".into()])?;
    // flat index = 2s + c; swaps 0↔3 and 2↔5
    permutation_unitary(&[3, 1, 5, 0, 4, 2], fact)
}

/// Measure-and-prepare channel ρ ↦ Σ_i Tr[E_i ρ] ρ_i.
///
/// The POVM must sum to the identity on the input space within 1e-9 and each
/// effect must be PSD; each prepared state lives on `out_fact`.
pub fn measure_prepare(
    povm: Vec<ComplexMatrix>,
    preps: Vec<DensityMatrix>,
    in_fact: Factorization,
) -> Result<QuantumChannel> {
    if povm.len() != preps.len() || povm.is_empty() {
        return Err(Error::InvalidInput(
            "POVM and preparation lists must be nonempty and equal length".into(),
        ));
    }
    let d_in = in_fact.total_dim();
    let mut sum = ComplexMatrix::zeros(d_in, d_in);
    for e in &povm {
        if e.rows != d_in || e.cols != d_in {
            return Err(Error::DimensionMismatch {
                expected: d_in,
                got: e.rows,
            });
        }
        sum = sum.add(e);
    }
    if sum.sub(&ComplexMatrix::identity(d_in)).max_abs() > 1e-9 {
        return Err(Error::InvalidChannel("POVM does not sum to identity".into()));
    }
    let out_fact = preps[0].fact.clone();
    let mut kraus = Vec::new();
    for (e, prep) in povm.iter().zip(preps.iter()) {
        if prep.fact.dims() != out_fact.dims() {
            return Err(Error::InvalidChannel("preparations live on different spaces".into()));
        }
        let e_eig = crate::qmat::eigh(e, 1e-9)?;
        if e_eig.min_value() < -1e-9 {
            return Err(Error::InvalidChannel(format!(
                "POVM effect not PSD (min eigenvalue {:.3e})",
                e_eig.min_value()
            )));
        }
        let p_eig = prep.eig()?;
        for (ei, &ev) in e_eig.values.iter().enumerate() {
            if ev <= 1e-12 {
                continue;
            }
            let f = e_eig.vectors.column(ei);
            for (pi, &pv) in p_eig.values.iter().enumerate() {
                if pv <= 1e-12 {
                    continue;
                }
                let u = p_eig.vectors.column(pi);
                // K = √(ev·pv) |u⟩⟨f|
                kraus.push(outer(&u, &f).scale_re((ev * pv).sqrt()));
            }
        }
    }
    QuantumChannel::new(kraus, in_fact, out_fact)
}

/// Composition B ∘ Tr_S: discard the system named by `s_fact`, then run `b`.
/// The input factorization is `s_fact` ⊗ `b.in_fact`.
pub fn trace_and_prepare(b: &QuantumChannel, s_fact: Factorization) -> Result<QuantumChannel> {
    let in_fact = s_fact.concat(&b.in_fact)?;
    let d_s = s_fact.total_dim();
    let d_c = b.in_fact.total_dim();
    let mut kraus = Vec::new();
    for s in 0..d_s {
        // T_s = ⟨s| ⊗ I_C
        let mut t = ComplexMatrix::zeros(d_c, d_s * d_c);
        for c in 0..d_c {
            t.set(c, s * d_c + c, Complex64::new(1.0, 0.0));
        }
        for k in &b.kraus {
            kraus.push(k.matmul(&t));
        }
    }
    QuantumChannel::new(kraus, in_fact, b.out_fact.clone())
}

/// Constant channel ρ ↦ σ (trace the input, prepare σ).
pub fn replace_with(sigma: &DensityMatrix, in_fact: Factorization) -> Result<QuantumChannel> {
    let d_in = in_fact.total_dim();
    let eig = sigma.eig()?;
    let mut kraus = Vec::new();
    for s in 0..d_in {
        let bra = basis_ket(d_in, s);
        for (pi, &pv) in eig.values.iter().enumerate() {
            if pv <= 1e-12 {
                continue;
            }
            kraus.push(outer(&eig.vectors.column(pi), &bra).scale_re(pv.sqrt()));
        }
    }
    QuantumChannel::new(kraus, in_fact, sigma.fact.clone())
}

/// Append a fixed state in front: ρ_C ↦ γ ⊗ ρ_C.
pub fn prepend_state(gamma: &DensityMatrix, c_fact: Factorization) -> Result<QuantumChannel> {
    let out_fact = gamma.fact.concat(&c_fact)?;
    let d_c = c_fact.total_dim();
    let eig = gamma.eig()?;
    let mut kraus = Vec::new();
    for (pi, &pv) in eig.values.iter().enumerate() {
        if pv <= 1e-12 {
            continue;
        }
        let u = eig.vectors.column(pi);
        // K = √pv |u⟩ ⊗ I_C, shape (d_g·d_c) × d_c
        let mut k = ComplexMatrix::zeros(gamma.dim() * d_c, d_c);
        for (s, &us) in u.iter().enumerate() {
            for c in 0..d_c {
                k.set(s * d_c + c, c, us.scale(pv.sqrt()));
            }
        }
        kraus.push(k);
    }
    QuantumChannel::new(kraus, c_fact, out_fact)
}

/// Depolarizing channel ρ ↦ (1−p)ρ + p·I/d on an arbitrary factorization.
pub fn depolarizing(p: f64, fact: Factorization) -> Result<QuantumChannel> {
    if !(0.0..=1.0).contains(&p) {
        return Err(Error::InvalidInput(format!("mixing weight {p} outside [0, 1]")));
    }
    let d = fact.total_dim();
    let mut kraus = vec![ComplexMatrix::identity(d).scale_re((1.0 - p).sqrt())];
    if p > 0.0 {
        let w = (p / d as f64).sqrt();
        for i in 0..d {
            for j in 0..d {
                kraus.push(outer(&basis_ket(d, i), &basis_ket(d, j)).scale_re(w));
            }
        }
    }
    QuantumChannel::new(kraus, fact.clone(), fact)
}

/// Zero-temperature athermality dilation on S ⊗ C: measure whether the
/// catalyst is in the ground level; on the ground outcome prepare the joint
/// ground state |0,0⟩, otherwise prepare σ on S and collapse C outside the
/// ground level. Satisfies Λ(ρ_S ⊗ |1⟩⟨1|_C) = σ_S ⊗ |1⟩⟨1|_C for every ρ_S
/// and Λ(|0,0⟩⟨0,0|) = |0,0⟩⟨0,0|.
pub fn zero_t_athermality(sigma: &DensityMatrix, c_dim: usize, c_label: &str) -> Result<QuantumChannel> {
    let s_fact = sigma.fact.clone();
    let c_fact = Factorization::single(c_dim, c_label)?;
    let fact = s_fact.concat(&c_fact)?;
    let d_s = sigma.dim();
    let d = d_s * c_dim;

    let mut kraus = Vec::new();
    // Ground outcome: K_s = |0_S, 0_C⟩ ⟨s_S, 0_C|
    for s in 0..d_s {
        let mut k = ComplexMatrix::zeros(d, d);
        k.set(0, s * c_dim, Complex64::new(1.0, 0.0));
        kraus.push(k);
    }
    // Excited outcome: K_{m,s} = √μ_m (|u_m⟩⟨s|)_S ⊗ (I_C − |0⟩⟨0|)
    let eig = sigma.eig()?;
    let mut p1 = ComplexMatrix::identity(c_dim);
    p1.set(0, 0, Complex64::new(0.0, 0.0));
    for (mi, &mv) in eig.values.iter().enumerate() {
        if mv <= 1e-12 {
            continue;
        }
        let u = eig.vectors.column(mi);
        for s in 0..d_s {
            let s_part = outer(&u, &basis_ket(d_s, s)).scale_re(mv.sqrt());
            kraus.push(s_part.kron(&p1));
        }
    }
    QuantumChannel::new(kraus, fact.clone(), fact)
}

/// The |±⟩ kets (|0⟩ ± |1⟩)/√2.
pub fn plus_minus_kets() -> [Vec<Complex64>; 2] {
    let s = std::f64::consts::FRAC_1_SQRT_2;
    [
        vec![Complex64::new(s, 0.0), Complex64::new(s, 0.0)],
        vec![Complex64::new(s, 0.0), Complex64::new(-s, 0.0)],
    ]
}

/// The maximally imaginary kets (|0⟩ ± i|1⟩)/√2.
pub fn imag_plus_minus_kets() -> [Vec<Complex64>; 2] {
    let s = std::f64::consts::FRAC_1_SQRT_2;
    [
        vec![Complex64::new(s, 0.0), Complex64::new(0.0, s)],
        vec![Complex64::new(s, 0.0), Complex64::new(0.0, -s)],
    ]
}

/// Coherence broadcaster on two qubits: measure the C marginal in the |±⟩
/// basis and prepare |x⟩⟨x| ⊗ |x⟩⟨x| on the outcome x, so
/// Λ(ρ_SC) = Σ_{x=±} (|x⟩⟨x| ⊗ |x⟩⟨x|) ⟨x|Tr_S ρ|x⟩.
pub fn local_coherence_broadcast(s_label: &str, c_label: &str) -> Result<QuantumChannel> {
    let fact = Factorization::new(vec![2, 2], vec![s_label.into(), c_label.into()])?;
    let mut kraus = Vec::new();
    for x in plus_minus_kets() {
        for s in 0..2usize {
            // K = (|x⟩ ⊗ |x⟩)(⟨s| ⊗ ⟨x|)
            let ket: Vec<Complex64> = kron_vec(&x, &x);
            let bra: Vec<Complex64> = kron_vec(&basis_ket(2, s), &x);
            kraus.push(outer(&ket, &bra));
        }
    }
    QuantumChannel::new(kraus, fact.clone(), fact)
}

fn kron_vec(a: &[Complex64], b: &[Complex64]) -> Vec<Complex64> {
    let mut out = Vec::with_capacity(a.len() * b.len());
    for &ai in a {
        for &bi in b {
            out.push(ai * bi);
        }
    }
    out
}
