//! The measure-and-prepare broadcaster behind the max-relative-entropy
//! threshold: broadcasting a state σ is possible exactly when the resource of
//! σ fits under the largest resource any catalyst state can carry, and the
//! witnessing channel measures {ψ, 1−ψ} and prepares σ⊗ψ or ω⊗ζ.

use crate::channel::constructors::measure_prepare;
use crate::channel::QuantumChannel;
use crate::error::{Error, Result};
use crate::freeset::{generating_states, membership, FreeSet};
use crate::monotone::simplex::{max_min_eigenvalue, mix};
use crate::qmat::{
    eigh, outer, tensor, ComplexMatrix, DensityMatrix,
};

/// Construction output: the broadcaster (when feasible) together with the
/// spectral pieces it was assembled from.
#[derive(Debug, Clone)]
pub struct DmaxBroadcast {
    pub feasible: bool,
    pub channel: Option<QuantumChannel>,
    /// Eigenprojector of the smallest eigenvalue of γ_C (lowest index on
    /// ties).
    pub psi: DensityMatrix,
    /// Smallest eigenvalue λ₁ of γ_C.
    pub lambda1: f64,
    /// ζ = (γ_C − λ₁ψ)/(1−λ₁).
    pub zeta: Option<DensityMatrix>,
    /// ω = (γ_S − λ₁σ)/(1−λ₁) for the selected free γ_S.
    pub omega: Option<DensityMatrix>,
    /// The free state achieving feasibility.
    pub gamma_s: Option<DensityMatrix>,
    /// λ_min(γ_S − λ₁σ) at the best free state found.
    pub margin: f64,
}

/// Build the broadcasting channel B: C → S'C for a singleton catalyst family
/// {γ_C}: measure {ψ, 1−ψ} and prepare σ⊗ψ on the first outcome, ω⊗ζ on the
/// second. Feasible iff some γ_S in the system family dominates λ₁σ.
pub fn construct_dmax_broadcast(
    gamma_c: &DensityMatrix,
    f_s: &FreeSet,
    sigma: &DensityMatrix,
) -> Result<DmaxBroadcast> {
    if sigma.dim() != f_s.dim() {
        return Err(Error::DimensionMismatch {
            expected: f_s.dim(),
            got: sigma.dim(),
        });
    }
    let eig = gamma_c.eig()?;
    if eig.min_value() < 1e-12 {
        return Err(Error::Precondition(
            "catalyst free state must be full rank".into(),
        ));
    }
    let lambda1 = eig.values[0];
    let psi_vec = eig.vectors.column(0);
    let psi_mat = outer(&psi_vec, &psi_vec);
    let psi = DensityMatrix::with_tols(psi_mat.clone(), gamma_c.fact.clone(), 1e-7, 1e-7, 1e-7)?;

    if 1.0 - lambda1 < 1e-12 {
        // degenerate edge: γ_C has a unit eigenvalue, so ζ is undefined; only
        // a trivial broadcaster of a free σ remains.
        let free = membership(sigma, f_s, 1e-7)?.is_member();
        let channel = if free {
            Some(trivial_broadcaster(sigma, gamma_c)?)
        } else {
            None
        };
        return Ok(DmaxBroadcast {
            feasible: free,
            channel,
            psi,
            lambda1,
            zeta: None,
            omega: None,
            gamma_s: None,
            margin: 0.0,
        });
    }

    let zeta_mat = gamma_c
        .mat
        .sub(&psi_mat.scale_re(lambda1))
        .scale_re(1.0 / (1.0 - lambda1));
    let zeta = DensityMatrix::with_tols(zeta_mat, gamma_c.fact.clone(), 1e-7, 1e-7, 1e-7)?;

    // search the system family for γ_S with γ_S − λ₁σ ⪰ 0
    let (margin, gamma_s_mat) = match f_s {
        FreeSet::Singleton(g) => {
            let m = g.mat.sub(&sigma.mat.scale_re(lambda1));
            (eigh(&m, 1e-7)?.min_value(), g.mat.clone())
        }
        _ => {
            let extremes = generating_states(f_s).ok_or_else(|| {
                Error::Unsupported(
                    "feasibility search needs a singleton or finite-extreme system family".into(),
                )
            })?;
            let base = sigma.mat.scale_re(-lambda1);
            let sol = max_min_eigenvalue(&base, &extremes);
            (sol.value, mix(&extremes, &sol.weights))
        }
    };

    // infeasibility is declared only when the relaxed margin clearly fails
    let feasible = margin >= -1e-6;
    if !feasible {
        return Ok(DmaxBroadcast {
            feasible: false,
            channel: None,
            psi,
            lambda1,
            zeta: Some(zeta),
            omega: None,
            gamma_s: None,
            margin,
        });
    }

    let gamma_s = DensityMatrix::with_tols(gamma_s_mat, sigma.fact.clone(), 1e-6, 1e-6, 1e-6)?;
    let omega_mat = gamma_s
        .mat
        .sub(&sigma.mat.scale_re(lambda1))
        .scale_re(1.0 / (1.0 - lambda1));
    // numerical dust from the feasibility margin is clamped to the PSD cone
    let omega_eig = eigh(&omega_mat, 1e-6)?;
    let omega_clamped = omega_eig.apply_fn(|l| l.max(0.0));
    let omega_tr = omega_clamped.trace().re;
    let omega = DensityMatrix::with_tols(
        omega_clamped.scale_re(1.0 / omega_tr),
        sigma.fact.clone(),
        1e-6,
        1e-6,
        1e-6,
    )?;

    let not_psi = ComplexMatrix::identity(gamma_c.dim()).sub(&psi_mat);
    let prep1 = tensor(sigma, &psi)?;
    let prep2 = tensor(&omega, &zeta)?;
    let channel = measure_prepare(
        vec![psi_mat, not_psi],
        vec![prep1, prep2],
        gamma_c.fact.clone(),
    )?;

    Ok(DmaxBroadcast {
        feasible: true,
        channel: Some(channel),
        psi,
        lambda1,
        zeta: Some(zeta),
        omega: Some(omega),
        gamma_s: Some(gamma_s),
        margin,
    })
}

/// B(ρ_C) = σ ⊗ ρ_C, the broadcaster that needs no resource.
fn trivial_broadcaster(
    sigma: &DensityMatrix,
    gamma_c: &DensityMatrix,
) -> Result<QuantumChannel> {
    crate::channel::constructors::prepend_state(sigma, gamma_c.fact.clone())
}
