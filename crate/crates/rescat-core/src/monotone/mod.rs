//! Resource monotones: max-relative entropy of resource, relative entropy of
//! resource, its reversed variant, and a measured lower bound.
//!
//! Conventions: values are in bits; +∞ is represented by `f64::INFINITY` and
//! serialized as `{"infinite": true}`. Every optimizer is deterministic and
//! reports its iteration count and a convergence residual so callers can gate
//! on solver quality.
//!
//! ```
//! # extern crate rescat_core;
//! use rescat_core::freeset::FreeSet;
//! use rescat_core::monotone::{dmax, rel_ent_resource};
//! use rescat_core::qmat::{basis_ket, DensityMatrix, Factorization};
//!
//! let fact = Factorization::single(2, "S")?;
//! let zero = DensityMatrix::pure(&basis_ket(2, 0), fact.clone())?;
//! let gamma = DensityMatrix::from_probs(&[0.7, 0.3], "S")?;
//!
//! // closed form: log₂ λ_max(γ^{-1/2} ρ γ^{-1/2}) = log₂(1/0.7)
//! let value = dmax(&zero, &FreeSet::Singleton(gamma))?;
//! assert!((value.value_bits - (1.0f64 / 0.7).log2()).abs() < 1e-12);
//!
//! // the maximally coherent qubit carries one bit of coherence
//! let s = std::f64::consts::FRAC_1_SQRT_2;
//! let plus = DensityMatrix::pure(
//!     &[rescat_core::qmat::Complex64::new(s, 0.0), rescat_core::qmat::Complex64::new(s, 0.0)],
//!     fact,
//! )?;
//! let coherence = rel_ent_resource(&plus, &FreeSet::incoherent(2))?;
//! assert!((coherence.value_bits - 1.0).abs() < 1e-6);
//! # Ok::<(), rescat_core::Error>(())
//! ```

use serde_json::{json, Value};

use crate::error::{Error, Result};
use crate::freeset::{generating_states, FreeSet};
use crate::qmat::{eigh, ComplexMatrix, DensityMatrix};

pub mod ent;
pub mod maxcomp;
pub mod simplex;

pub use ent::{kl_divergence_bits, rel_entropy_bits, von_neumann_entropy_bits};

use ent::{
    entropy_gradient_nat, inv_sqrt_on_support, log_frechet_adjoint, measurement_probs,
    support_contained, LN2, SUPPORT_EPS,
};
use simplex::{max_min_eigenvalue, mirror_descent, mix};

/// Optimizer certificate attached to a finite monotone value.
#[derive(Debug, Clone)]
pub enum Certificate {
    /// Closest free state found by the minimization.
    ClosestFreeState(ComplexMatrix),
    /// Feasible pair (ω, r) with ρ ≤ rω.
    Feasible { omega: ComplexMatrix, r: f64 },
}

/// Monotone value with optimizer evidence and convergence metadata.
#[derive(Debug, Clone)]
pub struct MonotoneResult {
    /// Value in bits; may be `f64::INFINITY`.
    pub value_bits: f64,
    pub certificate: Option<Certificate>,
    pub iterations: usize,
    pub residual: f64,
}

impl MonotoneResult {
    pub fn is_infinite(&self) -> bool {
        self.value_bits.is_infinite()
    }

    /// JSON form: `{value_bits, infinite, certificate, iterations, residual}`
    /// with infinity flagged, never a float sentinel.
    pub fn to_json(&self) -> Value {
        let certificate = match &self.certificate {
            None => Value::Null,
            Some(Certificate::ClosestFreeState(m)) => {
                json!({ "closest_free_state": raw_matrix_json(m) })
            }
            Some(Certificate::Feasible { omega, r }) => {
                json!({ "omega": raw_matrix_json(omega), "r": r })
            }
        };
        if self.value_bits.is_infinite() {
            json!({
                "infinite": true,
                "certificate": certificate,
                "iterations": self.iterations,
                "residual": self.residual,
            })
        } else {
            json!({
                "infinite": false,
                "value_bits": self.value_bits,
                "certificate": certificate,
                "iterations": self.iterations,
                "residual": self.residual,
            })
        }
    }
}

fn raw_matrix_json(m: &ComplexMatrix) -> Value {
    let data: Vec<[f64; 2]> = m.data.iter().map(|c| [c.re, c.im]).collect();
    json!({ "rows": m.rows, "cols": m.cols, "data": data })
}

/// A set of quantum measurements (each a complete POVM).
#[derive(Debug, Clone)]
pub struct MeasurementSet {
    pub povms: Vec<Vec<ComplexMatrix>>,
}

impl MeasurementSet {
    pub fn new(povms: Vec<Vec<ComplexMatrix>>) -> Result<Self> {
        if povms.is_empty() {
            return Err(Error::InvalidInput("measurement set must be nonempty".into()));
        }
        for povm in &povms {
            if povm.is_empty() {
                return Err(Error::InvalidInput("empty POVM".into()));
            }
            let d = povm[0].rows;
            let mut sum = ComplexMatrix::zeros(d, d);
            for e in povm {
                if eigh(e, 1e-7)?.min_value() < -1e-9 {
                    return Err(Error::InvalidInput("POVM effect is not PSD".into()));
                }
                sum = sum.add(e);
            }
            if sum.sub(&ComplexMatrix::identity(d)).max_abs() > 1e-9 {
                return Err(Error::InvalidInput("POVM does not sum to identity".into()));
            }
        }
        Ok(Self { povms })
    }

    /// The tetrahedral informationally complete qubit POVM.
    pub fn informationally_complete_qubit() -> Self {
        Self {
            povms: vec![crate::freeset::tetrahedral_povm()],
        }
    }

    /// Projective measurement in the computational basis.
    pub fn computational(dim: usize) -> Self {
        let povm: Vec<ComplexMatrix> = (0..dim)
            .map(|i| {
                let v = crate::qmat::basis_ket(dim, i);
                crate::qmat::outer(&v, &v)
            })
            .collect();
        Self { povms: vec![povm] }
    }
}

/// How a family is driven by the solvers.
enum FamilyKind<'a> {
    Singleton(&'a DensityMatrix),
    Simplex(Vec<ComplexMatrix>),
    MaxComposite(&'a [FreeSet]),
}

fn family_kind<'a>(family: &'a FreeSet) -> Result<FamilyKind<'a>> {
    if let FreeSet::Singleton(g) = family {
        return Ok(FamilyKind::Singleton(g));
    }
    if let FreeSet::Composite { rule, parts } = family {
        if matches!(rule, crate::freeset::CompositionRule::Max) {
            return Ok(FamilyKind::MaxComposite(parts));
        }
    }
    match generating_states(family) {
        Some(extremes) => Ok(FamilyKind::Simplex(extremes)),
        None => Err(Error::Unsupported(
            "monotones support singleton, incoherent, ground-state families and their Min/Max composites".into(),
        )),
    }
}

const DMAX_R_CAP: f64 = 1.0994e12; // 2^40
const BISECTION_WIDTH: f64 = 1e-9;

/// Max-relative entropy of resource
/// D_max(ρ‖F) = inf { log₂ r : ρ ≤ rω, ω ∈ F }, in bits.
///
/// Full-rank singletons use the closed form log₂ λ_max(γ^{-1/2} ρ γ^{-1/2});
/// finite-extreme families run a bisection on r with an interior-point inner
/// feasibility solve; Max composites run the bisection with an
/// alternating-projection inner step. Returns +∞ when the support of ρ is
/// not covered by any free state.
pub fn dmax(rho: &DensityMatrix, family: &FreeSet) -> Result<MonotoneResult> {
    check_dims(rho, family)?;
    match family_kind(family)? {
        FamilyKind::Singleton(gamma) => dmax_singleton_closed_form(rho, gamma),
        FamilyKind::Simplex(extremes) => dmax_bisection_over(rho, &extremes),
        FamilyKind::MaxComposite(parts) => dmax_maxcomp(rho, parts),
    }
}

/// Bisection route for any finite-extreme family (singletons included); used
/// to cross-check the closed form.
pub fn dmax_bisection(rho: &DensityMatrix, family: &FreeSet) -> Result<MonotoneResult> {
    check_dims(rho, family)?;
    let extremes = generating_states(family).ok_or_else(|| {
        Error::Unsupported("bisection route needs a finite-extreme family".into())
    })?;
    dmax_bisection_over(rho, &extremes)
}

fn check_dims(rho: &DensityMatrix, family: &FreeSet) -> Result<()> {
    if rho.dim() != family.dim() {
        return Err(Error::DimensionMismatch {
            expected: family.dim(),
            got: rho.dim(),
        });
    }
    Ok(())
}

fn dmax_singleton_closed_form(rho: &DensityMatrix, gamma: &DensityMatrix) -> Result<MonotoneResult> {
    let gamma_eig = gamma.eig()?;
    if !support_contained(&gamma_eig, &rho.mat) {
        return Ok(MonotoneResult {
            value_bits: f64::INFINITY,
            certificate: None,
            iterations: 1,
            residual: 0.0,
        });
    }
    let isq = inv_sqrt_on_support(&gamma_eig);
    let conj = isq.matmul(&rho.mat).matmul(&isq);
    let lam_max = eigh(&conj, 1e-7)?.max_value();
    let value = lam_max.max(1.0).log2();
    Ok(MonotoneResult {
        value_bits: value,
        certificate: Some(Certificate::Feasible {
            omega: gamma.mat.clone(),
            r: lam_max.max(1.0),
        }),
        iterations: 1,
        residual: 0.0,
    })
}

fn dmax_bisection_over(rho: &DensityMatrix, extremes: &[ComplexMatrix]) -> Result<MonotoneResult> {
    // support coverage: the widest free state is the uniform mixture
    let uniform = mix(extremes, &vec![1.0 / extremes.len() as f64; extremes.len()]);
    let uniform_eig = eigh(&uniform, 1e-7)?;
    if !support_contained(&uniform_eig, &rho.mat) {
        return Ok(MonotoneResult {
            value_bits: f64::INFINITY,
            certificate: None,
            iterations: 1,
            residual: 0.0,
        });
    }

    let feasible = |r: f64| -> (bool, Vec<f64>, f64) {
        let ops: Vec<ComplexMatrix> = extremes.iter().map(|e| e.scale_re(r)).collect();
        let base = rho.mat.scale_re(-1.0);
        let sol = max_min_eigenvalue(&base, &ops);
        (sol.value >= -1e-10, sol.weights, sol.value)
    };

    let mut iterations = 0usize;
    let (ok1, w1, v1) = feasible(1.0);
    iterations += 1;
    if ok1 {
        return Ok(MonotoneResult {
            value_bits: 0.0,
            certificate: Some(Certificate::Feasible {
                omega: mix(extremes, &w1),
                r: 1.0,
            }),
            iterations,
            residual: v1.min(0.0).abs(),
        });
    }
    let mut lo = 1.0f64;
    let mut hi = 2.0f64;
    let mut hi_w;
    loop {
        let (ok, w, _v) = feasible(hi);
        iterations += 1;
        if ok {
            hi_w = w;
            break;
        }
        lo = hi;
        hi *= 4.0;
        if hi > DMAX_R_CAP {
            return Ok(MonotoneResult {
                value_bits: f64::INFINITY,
                certificate: None,
                iterations,
                residual: 0.0,
            });
        }
    }
    while hi - lo > BISECTION_WIDTH && (hi - lo) > 1e-14 * hi {
        let mid = 0.5 * (lo + hi);
        let (ok, w, _v) = feasible(mid);
        iterations += 1;
        if ok {
            hi = mid;
            hi_w = w;
        } else {
            lo = mid;
        }
    }
    let omega = mix(extremes, &hi_w);
    let residual = eigh(&omega.scale_re(hi).sub(&rho.mat), 1e-7)?
        .min_value()
        .min(0.0)
        .abs();
    Ok(MonotoneResult {
        value_bits: hi.log2(),
        certificate: Some(Certificate::Feasible { omega, r: hi }),
        iterations,
        residual,
    })
}

fn dmax_maxcomp(rho: &DensityMatrix, parts: &[FreeSet]) -> Result<MonotoneResult> {
    maxcomp::check_state(rho, parts)?;
    let family = maxcomp::MaxFamily::new(parts, &rho.fact)?;
    let mut iterations = 0usize;
    let feasible = |r: f64, iters: &mut usize| -> (bool, ComplexMatrix, f64) {
        let (ok, omega, gap, it) = family.shifted_psd_feasible(&rho.mat, r, 800);
        *iters += it;
        (ok, omega, gap)
    };
    let (ok1, om1, gap1) = feasible(1.0, &mut iterations);
    if ok1 {
        return Ok(MonotoneResult {
            value_bits: 0.0,
            certificate: Some(Certificate::Feasible { omega: om1, r: 1.0 }),
            iterations,
            residual: gap1,
        });
    }
    let mut lo = 1.0;
    let mut hi = 2.0;
    let mut best;
    loop {
        let (ok, om, gap) = feasible(hi, &mut iterations);
        if ok {
            best = (om, gap);
            break;
        }
        lo = hi;
        hi *= 4.0;
        if hi > DMAX_R_CAP {
            return Ok(MonotoneResult {
                value_bits: f64::INFINITY,
                certificate: None,
                iterations,
                residual: gap,
            });
        }
    }
    while hi - lo > 1e-7 && (hi - lo) > 1e-12 * hi {
        let mid = 0.5 * (lo + hi);
        let (ok, om, gap) = feasible(mid, &mut iterations);
        if ok {
            hi = mid;
            best = (om, gap);
        } else {
            lo = mid;
        }
    }
    Ok(MonotoneResult {
        value_bits: hi.log2(),
        certificate: Some(Certificate::Feasible { omega: best.0, r: hi }),
        iterations,
        residual: best.1,
    })
}

/// Relative entropy of resource R(ρ) = inf_{σ ∈ F} S(ρ‖σ), in bits.
pub fn rel_ent_resource(rho: &DensityMatrix, family: &FreeSet) -> Result<MonotoneResult> {
    check_dims(rho, family)?;
    match family_kind(family)? {
        FamilyKind::Singleton(gamma) => {
            let value = rel_entropy_bits(&rho.mat, &gamma.mat)?;
            Ok(MonotoneResult {
                value_bits: value,
                certificate: Some(Certificate::ClosestFreeState(gamma.mat.clone())),
                iterations: 1,
                residual: 0.0,
            })
        }
        FamilyKind::Simplex(extremes) => {
            let uniform = mix(&extremes, &vec![1.0 / extremes.len() as f64; extremes.len()]);
            let uniform_eig = eigh(&uniform, 1e-7)?;
            if !support_contained(&uniform_eig, &rho.mat) {
                return Ok(MonotoneResult {
                    value_bits: f64::INFINITY,
                    certificate: None,
                    iterations: 1,
                    residual: 0.0,
                });
            }
            let s_rho: f64 = rho
                .eig()?
                .values
                .iter()
                .filter(|&&l| l > SUPPORT_EPS)
                .map(|&l| l * l.log2())
                .sum();
            let sol = mirror_descent(extremes.len(), 20000, 1e-10, |w| {
                let sigma = mix(&extremes, w);
                let sigma_eig = eigh(&sigma, 1e-6).expect("mixture of free states");
                let log_sigma =
                    sigma_eig.apply_fn(|l| if l > SUPPORT_EPS { l.log2() } else { 0.0 });
                let value = s_rho - rho.mat.matmul(&log_sigma).trace().re;
                let g_mat = log_frechet_adjoint(&sigma_eig, &rho.mat);
                let grad: Vec<f64> = extremes
                    .iter()
                    .map(|e| -g_mat.hs_inner(e).re / LN2)
                    .collect();
                (value, grad)
            });
            Ok(MonotoneResult {
                value_bits: sol.value.max(0.0),
                certificate: Some(Certificate::ClosestFreeState(mix(&extremes, &sol.weights))),
                iterations: sol.iterations,
                residual: sol.gap.abs(),
            })
        }
        FamilyKind::MaxComposite(parts) => {
            maxcomp::check_state(rho, parts)?;
            let family = maxcomp::MaxFamily::new(parts, &rho.fact)?;
            let s_rho: f64 = rho
                .eig()?
                .values
                .iter()
                .filter(|&&l| l > SUPPORT_EPS)
                .map(|&l| l * l.log2())
                .sum();
            let rho_mat = rho.mat.clone();
            let (sigma, value, iterations) = family.minimize(
                |s| {
                    if !maxcomp::supports(s, &rho_mat) {
                        return f64::INFINITY;
                    }
                    match eigh(s, 1e-6) {
                        Ok(e) => {
                            let log_s =
                                e.apply_fn(|l| if l > SUPPORT_EPS { l.log2() } else { 0.0 });
                            s_rho - rho_mat.matmul(&log_s).trace().re
                        }
                        Err(_) => f64::INFINITY,
                    }
                },
                |s| maxcomp::rel_ent_gradient(s, &rho_mat),
                400,
            );
            Ok(MonotoneResult {
                value_bits: value.max(0.0),
                certificate: Some(Certificate::ClosestFreeState(sigma)),
                iterations,
                residual: f64::NAN, // no certified gap on this route
            })
        }
    }
}

/// Reversed relative entropy of resource R̄(ρ) = inf_{γ ∈ F} S(γ‖ρ), in
/// bits; +∞ when no free state is supported inside supp ρ. Additive over
/// products of Min-composed families.
pub fn rev_rel_ent_resource(rho: &DensityMatrix, family: &FreeSet) -> Result<MonotoneResult> {
    check_dims(rho, family)?;
    let rho_eig = rho.eig()?;
    let kernel = rho_eig.apply_fn(|l| if l > SUPPORT_EPS { 0.0 } else { 1.0 });
    match family_kind(family)? {
        FamilyKind::Singleton(gamma) => {
            let value = rel_entropy_bits(&gamma.mat, &rho.mat)?;
            Ok(MonotoneResult {
                value_bits: value,
                certificate: value.is_finite().then(|| Certificate::ClosestFreeState(gamma.mat.clone())),
                iterations: 1,
                residual: 0.0,
            })
        }
        FamilyKind::Simplex(extremes) => {
            // only extremes supported inside supp ρ can carry weight
            let usable: Vec<ComplexMatrix> = extremes
                .into_iter()
                .filter(|e| kernel.matmul(e).trace().re.abs() <= SUPPORT_EPS)
                .collect();
            if usable.is_empty() {
                return Ok(MonotoneResult {
                    value_bits: f64::INFINITY,
                    certificate: None,
                    iterations: 1,
                    residual: 0.0,
                });
            }
            let log_rho = rho_eig.apply_fn(|l| if l > SUPPORT_EPS { l.log2() } else { 0.0 });
            let sol = mirror_descent(usable.len(), 20000, 1e-10, |w| {
                let gamma = mix(&usable, w);
                let gamma_eig = eigh(&gamma, 1e-6).expect("mixture of free states");
                let s_gamma: f64 = gamma_eig
                    .values
                    .iter()
                    .filter(|&&l| l > SUPPORT_EPS)
                    .map(|&l| l * l.log2())
                    .sum();
                let value = s_gamma - gamma.matmul(&log_rho).trace().re;
                let grad_mat = entropy_gradient_nat(&gamma_eig)
                    .scale_re(1.0 / LN2)
                    .sub(&log_rho);
                let grad: Vec<f64> = usable.iter().map(|e| grad_mat.hs_inner(e).re).collect();
                (value, grad)
            });
            Ok(MonotoneResult {
                value_bits: sol.value.max(0.0),
                certificate: Some(Certificate::ClosestFreeState(mix(&usable, &sol.weights))),
                iterations: sol.iterations,
                residual: sol.gap.abs(),
            })
        }
        FamilyKind::MaxComposite(parts) => {
            maxcomp::check_state(rho, parts)?;
            let family = maxcomp::MaxFamily::new(parts, &rho.fact)?;
            let log_rho = rho_eig.apply_fn(|l| if l > SUPPORT_EPS { l.log2() } else { 0.0 });
            let rho_mat = rho.mat.clone();
            let kernel2 = kernel.clone();
            let (gamma, value, iterations) = family.minimize(
                |g| {
                    if kernel2.matmul(g).trace().re.abs() > 1e-8 {
                        return f64::INFINITY;
                    }
                    match eigh(g, 1e-6) {
                        Ok(e) => {
                            let s_g: f64 = e
                                .values
                                .iter()
                                .filter(|&&l| l > SUPPORT_EPS)
                                .map(|&l| l * l.log2())
                                .sum();
                            s_g - g.matmul(&log_rho).trace().re
                        }
                        Err(_) => f64::INFINITY,
                    }
                },
                |g| {
                    let e = eigh(g, 1e-6).ok()?;
                    Some(entropy_gradient_nat(&e).scale_re(1.0 / LN2).sub(&log_rho))
                },
                400,
            );
            let _ = rho_mat;
            Ok(MonotoneResult {
                value_bits: value.max(0.0),
                certificate: Some(Certificate::ClosestFreeState(gamma)),
                iterations,
                residual: f64::NAN,
            })
        }
    }
}

/// Certified lower bound on the relative entropy of resource under
/// restricted measurements:
/// inf_{σ ∈ F} max_{M ∈ M₀} D_KL(M(ρ)‖M(σ)), in bits.
///
/// This is a lower bound on the same quantity for any measurement set
/// containing M₀ (pointwise sup dominance), and a lower bound on R(ρ) by
/// data processing.
pub fn measured_rel_ent_resource_lb(
    rho: &DensityMatrix,
    family: &FreeSet,
    measurements: &MeasurementSet,
) -> Result<MonotoneResult> {
    check_dims(rho, family)?;
    let extremes = match family_kind(family)? {
        FamilyKind::Singleton(g) => vec![g.mat.clone()],
        FamilyKind::Simplex(e) => e,
        FamilyKind::MaxComposite(_) => {
            return Err(Error::Unsupported(
                "measured lower bound supports finite-extreme families".into(),
            ))
        }
    };
    let p_vecs: Vec<Vec<f64>> = measurements
        .povms
        .iter()
        .map(|povm| measurement_probs(povm, &rho.mat))
        .collect();
    let sol = mirror_descent(extremes.len(), 20000, 1e-10, |w| {
        let sigma = mix(&extremes, w);
        // inner max over the measurement list; ties broken by lowest index
        let mut best = (0usize, f64::NEG_INFINITY);
        for (mi, povm) in measurements.povms.iter().enumerate() {
            let q = measurement_probs(povm, &sigma);
            let v = kl_divergence_bits(&p_vecs[mi], &q);
            if v > best.1 {
                best = (mi, v);
            }
        }
        let (mi, value) = best;
        if !value.is_finite() {
            // push weight toward effects covering the violated outcome
            let povm = &measurements.povms[mi];
            let q = measurement_probs(povm, &sigma);
            let grad: Vec<f64> = extremes
                .iter()
                .map(|e| {
                    let mut g = 0.0;
                    for (i, qi) in q.iter().enumerate() {
                        if p_vecs[mi][i] > SUPPORT_EPS && *qi <= SUPPORT_EPS {
                            g -= povm[i].matmul(e).trace().re;
                        }
                    }
                    g
                })
                .collect();
            return (1e6, grad);
        }
        let povm = &measurements.povms[mi];
        let q = measurement_probs(povm, &sigma);
        let grad: Vec<f64> = extremes
            .iter()
            .map(|e| {
                let mut g = 0.0;
                for (i, qi) in q.iter().enumerate() {
                    let pi = p_vecs[mi][i];
                    if pi > SUPPORT_EPS && *qi > SUPPORT_EPS {
                        g -= pi / (qi * LN2) * povm[i].matmul(e).trace().re;
                    }
                }
                g
            })
            .collect();
        (value, grad)
    });
    let value = if sol.value >= 1e6 { f64::INFINITY } else { sol.value.max(0.0) };
    Ok(MonotoneResult {
        value_bits: value,
        certificate: value
            .is_finite()
            .then(|| Certificate::ClosestFreeState(mix(&extremes, &sol.weights))),
        iterations: sol.iterations,
        residual: sol.gap.abs(),
    })
}

#[cfg(test)]
mod tests;
