//! Monotone evaluation over Max-composed families by alternating
//! projections.
//!
//! A Max composite pins each part marginal to its free family. For the parts
//! supported here the marginal constraints are affine (pinned to a singleton
//! state or to the diagonal subspace of a basis), so projecting onto the
//! feasible set alternates cheap affine corrections with a PSD clamp. The
//! feasibility verdicts carry explicit residuals; no infeasibility
//! certificate is produced.

use super::ent::{log_frechet_adjoint, psd_projection, SUPPORT_EPS};
use crate::error::{Error, Result};
use crate::freeset::{dephase, FreeSet};
use crate::qmat::{
    eigh, partial_trace_mat, product_on_positions, Complex64, ComplexMatrix, DensityMatrix,
    Factorization,
};

pub struct MaxFamily<'a> {
    parts: &'a [FreeSet],
    fact: Factorization,
    groups: Vec<Vec<usize>>,
}

impl<'a> MaxFamily<'a> {
    pub fn new(parts: &'a [FreeSet], fact: &Factorization) -> Result<Self> {
        let mut groups = Vec::new();
        let mut pos = 0usize;
        for part in parts {
            match part {
                FreeSet::Singleton(_) | FreeSet::Incoherent { .. } | FreeSet::GroundState { .. } => {}
                _ => {
                    return Err(Error::Unsupported(
                        "max-composite monotones support singleton, incoherent and ground-state parts".into(),
                    ))
                }
            }
            let target = part.dim();
            let mut acc = 1usize;
            let mut group = Vec::new();
            while acc < target {
                acc *= fact.dims()[pos];
                group.push(pos);
                pos += 1;
            }
            if acc != target {
                return Err(Error::InvalidInput(
                    "state subsystems do not align with composite parts".into(),
                ));
            }
            groups.push(group);
        }
        Ok(Self {
            parts,
            fact: fact.clone(),
            groups,
        })
    }

    /// One cycle of affine corrections: hermitize, enforce each marginal
    /// constraint, renormalize the trace.
    fn affine_cycle(&self, x: &ComplexMatrix) -> ComplexMatrix {
        let mut x = x.hermitian_part();
        let d = self.fact.total_dim();
        for (part, group) in self.parts.iter().zip(self.groups.iter()) {
            let keep_fact = self.fact.select(group);
            let keep_labels: Vec<&str> = keep_fact.labels().iter().map(|s| s.as_str()).collect();
            let marginal = match partial_trace_mat(&x, &self.fact, &keep_labels) {
                Ok(m) => m,
                Err(_) => continue,
            };
            let delta = match part {
                FreeSet::Singleton(g) => g.mat.sub(&marginal),
                FreeSet::GroundState { dim, level } => {
                    let mut p = ComplexMatrix::zeros(*dim, *dim);
                    p.set(*level, *level, Complex64::new(1.0, 0.0));
                    p.sub(&marginal)
                }
                FreeSet::Incoherent { basis } => dephase(&marginal, basis).sub(&marginal),
                _ => unreachable!("checked in new"),
            };
            let rest: Vec<usize> = (0..self.fact.subsystems())
                .filter(|p| !group.contains(p))
                .collect();
            let d_rest = d / keep_fact.total_dim();
            let lift = product_on_positions(
                &self.fact,
                &delta.scale_re(1.0 / d_rest as f64),
                group,
                &ComplexMatrix::identity(d_rest),
                &rest,
            );
            x = x.add(&lift);
        }
        // unit trace
        let tr = x.trace().re;
        let mut fixed = x;
        let corr = (1.0 - tr) / d as f64;
        for i in 0..d {
            let v = fixed.get(i, i);
            fixed.set(i, i, v + Complex64::new(corr, 0.0));
        }
        fixed
    }

    fn marginal_residual(&self, x: &ComplexMatrix) -> f64 {
        self.affine_cycle(x).sub(x).max_abs()
    }

    /// Project (approximately) onto the feasible set: affine constraints ∩
    /// PSD ∩ unit trace.
    fn project_feasible(&self, x: &ComplexMatrix, cycles: usize) -> ComplexMatrix {
        let mut y = x.clone();
        for _ in 0..cycles {
            y = self.affine_cycle(&y);
            y = match psd_projection(&y) {
                Ok(p) => p,
                Err(_) => return y,
            };
            let res = self.marginal_residual(&y);
            if res < 1e-12 {
                break;
            }
        }
        self.affine_cycle(&y)
    }

    /// Inner feasibility of the max-relative-entropy bisection: does some
    /// feasible ω satisfy rω − ρ ⪰ 0?
    pub fn shifted_psd_feasible(
        &self,
        rho: &ComplexMatrix,
        r: f64,
        max_iters: usize,
    ) -> (bool, ComplexMatrix, f64, usize) {
        let d = self.fact.total_dim();
        let mut omega = ComplexMatrix::identity(d).scale_re(1.0 / d as f64);
        let mut best_gap = f64::INFINITY;
        let mut iters = 0;
        for it in 0..max_iters {
            iters = it + 1;
            omega = self.affine_cycle(&omega);
            // ω ← (ρ + PSD(rω − ρ)) / r
            let shifted = omega.scale_re(r).sub(rho);
            let clamped = match psd_projection(&shifted) {
                Ok(c) => c,
                Err(_) => break,
            };
            omega = rho.add(&clamped).scale_re(1.0 / r);
            let marg = self.marginal_residual(&omega);
            let lam = eigh(&omega.scale_re(r).sub(rho), 1e-6)
                .map(|e| e.min_value())
                .unwrap_or(f64::NEG_INFINITY);
            let gap = marg.max((-lam).max(0.0));
            if gap < best_gap {
                best_gap = gap;
            }
            if gap <= 1e-9 {
                return (true, omega, gap, iters);
            }
        }
        (best_gap <= 1e-8, omega, best_gap, iters)
    }

    /// Minimize an entropic objective over the feasible set by projected
    /// gradient descent. `grad` maps the current σ (with eigendecomposition
    /// available) to the Euclidean gradient; `value` evaluates the objective.
    pub fn minimize<FV, FG>(
        &self,
        value: FV,
        grad: FG,
        max_iters: usize,
    ) -> (ComplexMatrix, f64, usize)
    where
        FV: Fn(&ComplexMatrix) -> f64,
        FG: Fn(&ComplexMatrix) -> Option<ComplexMatrix>,
    {
        let d = self.fact.total_dim();
        let start = ComplexMatrix::identity(d).scale_re(1.0 / d as f64);
        let mut sigma = self.project_feasible(&start, 200);
        // keep strictly inside the PSD cone so log gradients exist
        sigma = sigma
            .scale_re(1.0 - 1e-9)
            .add(&ComplexMatrix::identity(d).scale_re(1e-9 / d as f64));
        let mut best = sigma.clone();
        let mut best_value = value(&sigma);
        let mut step = 0.5f64;
        let mut iters = 0;
        for it in 0..max_iters {
            iters = it + 1;
            let g = match grad(&sigma) {
                Some(g) => g,
                None => break,
            };
            let g_norm = g.frobenius_norm().max(1e-12);
            let candidate = sigma.sub(&g.scale_re(step / g_norm));
            let projected = self.project_feasible(&candidate, 60);
            let mixed = projected
                .scale_re(1.0 - 1e-12)
                .add(&ComplexMatrix::identity(d).scale_re(1e-12 / d as f64));
            let v = value(&mixed);
            if v < best_value - 1e-14 {
                best_value = v;
                best = mixed.clone();
                sigma = mixed;
            } else {
                step *= 0.5;
                if step < 1e-8 {
                    break;
                }
            }
        }
        (best, best_value, iters)
    }
}

/// Gradient of σ ↦ −Tr[ρ log₂ σ] (the σ-dependent part of S(ρ‖σ)).
pub fn rel_ent_gradient(sigma: &ComplexMatrix, rho: &ComplexMatrix) -> Option<ComplexMatrix> {
    let eig = eigh(sigma, 1e-6).ok()?;
    if eig.min_value() < -1e-8 {
        return None;
    }
    Some(log_frechet_adjoint(&eig, rho).scale_re(-1.0 / super::ent::LN2))
}

/// Check that σ stays usable for relative-entropy objectives against ρ.
pub fn supports(sigma: &ComplexMatrix, rho: &ComplexMatrix) -> bool {
    match eigh(sigma, 1e-6) {
        Ok(e) => {
            let kernel = e.apply_fn(|l| if l > SUPPORT_EPS { 0.0 } else { 1.0 });
            kernel.matmul(rho).trace().re.abs() <= 1e-8
        }
        Err(_) => false,
    }
}

/// Validates alignment of a state with a Max-composed family.
pub fn check_state(rho: &DensityMatrix, parts: &[FreeSet]) -> Result<()> {
    let total: usize = parts.iter().map(|p| p.dim()).product();
    if rho.dim() != total {
        return Err(Error::DimensionMismatch {
            expected: total,
            got: rho.dim(),
        });
    }
    Ok(())
}
