//! Entropic primitives in bits (base-2 logarithms, 0·log 0 = 0).

use crate::error::Result;
use crate::qmat::{eigh, ComplexMatrix, HermitianEig};

/// Eigenvalues below this threshold count as outside the support.
pub const SUPPORT_EPS: f64 = 1e-10;

pub const LN2: f64 = std::f64::consts::LN_2;

/// Von Neumann entropy S(ρ) in bits.
pub fn von_neumann_entropy_bits(rho: &ComplexMatrix) -> Result<f64> {
    let eig = eigh(rho, 1e-7)?;
    Ok(-eig
        .values
        .iter()
        .filter(|&&l| l > SUPPORT_EPS)
        .map(|&l| l * l.log2())
        .sum::<f64>())
}

/// Quantum relative entropy S(ρ‖σ) in bits; +∞ when supp ρ ⊄ supp σ.
pub fn rel_entropy_bits(rho: &ComplexMatrix, sigma: &ComplexMatrix) -> Result<f64> {
    let rho_eig = eigh(rho, 1e-7)?;
    let sigma_eig = eigh(sigma, 1e-7)?;
    if !support_contained(&sigma_eig, rho) {
        return Ok(f64::INFINITY);
    }
    let s_rho: f64 = rho_eig
        .values
        .iter()
        .filter(|&&l| l > SUPPORT_EPS)
        .map(|&l| l * l.log2())
        .sum();
    let log_sigma = sigma_eig.apply_fn(|l| if l > SUPPORT_EPS { l.log2() } else { 0.0 });
    let cross = rho.matmul(&log_sigma).trace().re;
    Ok(s_rho - cross)
}

/// Is supp(ρ) ⊆ supp(σ)? Checked as Tr[(I − Π_σ)ρ] ≤ eps.
pub fn support_contained(sigma_eig: &HermitianEig, rho: &ComplexMatrix) -> bool {
    let kernel_proj = sigma_eig.apply_fn(|l| if l > SUPPORT_EPS { 0.0 } else { 1.0 });
    kernel_proj.matmul(rho).trace().re.abs() <= SUPPORT_EPS
}

/// Classical Kullback-Leibler divergence in bits; +∞ on support violation.
pub fn kl_divergence_bits(p: &[f64], q: &[f64]) -> f64 {
    let mut acc = 0.0;
    for (&pi, &qi) in p.iter().zip(q.iter()) {
        if pi <= SUPPORT_EPS {
            continue;
        }
        if qi <= SUPPORT_EPS {
            return f64::INFINITY;
        }
        acc += pi * (pi / qi).log2();
    }
    acc
}

/// Adjoint of the Fréchet derivative of σ ↦ Tr[ρ ln σ]: the Hermitian G with
/// d/ds Tr[ρ ln(σ + sH)]|₀ = Tr[G H], in natural log units. σ is passed by
/// eigendecomposition; eigenvalues outside the support are ignored (valid
/// when supp ρ ⊆ supp σ).
pub fn log_frechet_adjoint(sigma_eig: &HermitianEig, rho: &ComplexMatrix) -> ComplexMatrix {
    let n = rho.rows;
    let v = &sigma_eig.vectors;
    let rho_tilde = v.adjoint().matmul(rho).matmul(v);
    let mut g_tilde = ComplexMatrix::zeros(n, n);
    for i in 0..n {
        for j in 0..n {
            let li = sigma_eig.values[i];
            let lj = sigma_eig.values[j];
            if li <= SUPPORT_EPS || lj <= SUPPORT_EPS {
                continue;
            }
            let k = if (li - lj).abs() < 1e-12 * li.max(lj) {
                1.0 / li
            } else {
                (li.ln() - lj.ln()) / (li - lj)
            };
            g_tilde.set(i, j, rho_tilde.get(i, j).scale(k));
        }
    }
    v.matmul(&g_tilde).matmul(&v.adjoint())
}

/// ln(X) + I on the support of X, the gradient of X ↦ Tr[X ln X].
pub fn entropy_gradient_nat(x_eig: &HermitianEig) -> ComplexMatrix {
    x_eig.apply_fn(|l| if l > SUPPORT_EPS { l.ln() + 1.0 } else { 0.0 })
}

/// Probability vector of a POVM measurement on ρ.
pub fn measurement_probs(povm: &[ComplexMatrix], rho: &ComplexMatrix) -> Vec<f64> {
    povm.iter()
        .map(|e| e.matmul(rho).trace().re.max(0.0))
        .collect()
}

/// Projector onto the support of a PSD matrix.
pub fn support_projector(eig: &HermitianEig) -> ComplexMatrix {
    eig.apply_fn(|l| if l > SUPPORT_EPS { 1.0 } else { 0.0 })
}

/// Inverse square root on the support.
pub fn inv_sqrt_on_support(eig: &HermitianEig) -> ComplexMatrix {
    eig.apply_fn(|l| if l > SUPPORT_EPS { 1.0 / l.sqrt() } else { 0.0 })
}

/// Clamp a Hermitian matrix to the PSD cone.
pub fn psd_projection(m: &ComplexMatrix) -> Result<ComplexMatrix> {
    let eig = eigh(m, 1e-7)?;
    Ok(eig.apply_fn(|l| l.max(0.0)))
}
