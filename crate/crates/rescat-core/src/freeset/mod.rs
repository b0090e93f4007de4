//! Structured free-state families, composition rules and membership tests.
//!
//! A [`FreeSet`] describes one of the base families (a singleton, the
//! incoherent states of a basis, the real states of a basis, a ground-state
//! projector, or the separable states of a small bipartition) or a composite
//! built from parts with a [`CompositionRule`]. Membership verdicts are
//! three-valued: `Indeterminate` is first class and is never coerced to a
//! yes/no answer.
//!
//! ```
//! # extern crate rescat_core;
//! use rescat_core::freeset::{compose, membership, CompositionRule, FreeSet};
//! use rescat_core::qmat::{Complex64, DensityMatrix, Factorization};
//!
//! // the Bell state has free marginals but is entangled, so it sits inside
//! // the maximal composition and outside the separable one
//! let amp = [
//!     Complex64::new(1.0, 0.0), Complex64::new(0.0, 0.0),
//!     Complex64::new(0.0, 0.0), Complex64::new(1.0, 0.0),
//! ];
//! let fact = Factorization::new(vec![2, 2], vec!["A".into(), "B".into()])?;
//! let bell = DensityMatrix::pure(&amp, fact)?;
//!
//! let parts = vec![FreeSet::incoherent(2), FreeSet::incoherent(2)];
//! let max = compose(parts.clone(), CompositionRule::Max)?;
//! let sep = compose(parts, CompositionRule::Sep)?;
//! assert!(membership(&bell, &max, 1e-7)?.is_member());
//! assert!(!membership(&bell, &sep, 1e-7)?.is_member());
//! # Ok::<(), rescat_core::Error>(())
//! ```

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::opt::project_to_simplex;
use crate::qmat::{
    eigh, partial_trace_mat, trace_distance, Complex64, ComplexMatrix, DensityMatrix,
    Factorization,
};

pub mod json;
pub mod rng;
pub mod span;

pub use json::FreeSetJson;
pub use rng::{is_rng, RngReport, RngStrategy};

/// Default tolerance for membership decisions.
pub const MEMBERSHIP_TOL: f64 = 1e-7;

/// Composition rule assigning the free set of a composite system.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum CompositionRule {
    /// Convex hull of products of free states.
    Min,
    /// Max-composition intersected with the separable states.
    Sep,
    /// All states whose marginals are free.
    Max,
    /// Affine hull of products of free states, intersected with the states.
    Affine,
}

/// Free-state family descriptor.
#[derive(Debug, Clone)]
pub enum FreeSet {
    /// A single free state.
    Singleton(DensityMatrix),
    /// States diagonal in the given orthonormal basis (columns of `basis`).
    Incoherent { basis: ComplexMatrix },
    /// States with real entries in the given orthonormal basis.
    Real { basis: ComplexMatrix },
    /// Only the projector onto one level is free.
    GroundState { dim: usize, level: usize },
    /// Separable states across a fixed bipartition (exact at 2⊗2 and 2⊗3).
    SeparableDesk { dims: (usize, usize) },
    /// Composite family built from parts.
    Composite {
        rule: CompositionRule,
        parts: Vec<FreeSet>,
    },
}

/// Three-valued membership verdict.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Verdict {
    Member,
    NonMember,
    Indeterminate,
}

/// Evidence attached to a membership verdict.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", tag = "kind")]
pub enum Witness {
    /// Trace distance to the singleton free state.
    TraceDistance { distance: f64 },
    /// Largest off-basis matrix element (coherence witness).
    OffBasis { row: usize, col: usize, magnitude: f64 },
    /// Largest imaginary part in the reference basis.
    Imaginary { row: usize, col: usize, magnitude: f64 },
    /// Overlap with the ground level.
    GroundOverlap { overlap: f64 },
    /// Negative eigenvalue of the partial transpose.
    PartialTransposeEig { min_eig: f64 },
    /// A marginal fails its part membership.
    MarginalViolation { part: usize, report: Box<MembershipReport> },
    /// Distance from the best convex decomposition into free products.
    DecompositionResidual { residual: f64 },
    /// Distance from the affine span of free products.
    SpanResidual { residual: f64 },
    /// Inner-approximation certificate for an indeterminate verdict.
    InnerApproximation { residual: f64 },
}

/// Membership decision with diagnostics. `margin` is the violation magnitude
/// the verdict was derived from (compared against the tolerance).
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct MembershipReport {
    pub verdict: Verdict,
    pub margin: f64,
    pub witness: Option<Witness>,
}

impl MembershipReport {
    pub fn is_member(&self) -> bool {
        self.verdict == Verdict::Member
    }

    fn member(margin: f64) -> Self {
        Self {
            verdict: Verdict::Member,
            margin,
            witness: None,
        }
    }

    fn non_member(margin: f64, witness: Witness) -> Self {
        Self {
            verdict: Verdict::NonMember,
            margin,
            witness: Some(witness),
        }
    }

    fn indeterminate(margin: f64, witness: Witness) -> Self {
        Self {
            verdict: Verdict::Indeterminate,
            margin,
            witness: Some(witness),
        }
    }
}

impl FreeSet {
    /// Incoherent states of the computational basis.
    pub fn incoherent(dim: usize) -> Self {
        FreeSet::Incoherent {
            basis: ComplexMatrix::identity(dim),
        }
    }

    /// Real states of the computational basis.
    pub fn real(dim: usize) -> Self {
        FreeSet::Real {
            basis: ComplexMatrix::identity(dim),
        }
    }

    pub fn ground_state(dim: usize) -> Self {
        FreeSet::GroundState { dim, level: 0 }
    }

    /// Matrix dimension of the family.
    pub fn dim(&self) -> usize {
        match self {
            FreeSet::Singleton(g) => g.dim(),
            FreeSet::Incoherent { basis } | FreeSet::Real { basis } => basis.rows,
            FreeSet::GroundState { dim, .. } => *dim,
            FreeSet::SeparableDesk { dims } => dims.0 * dims.1,
            FreeSet::Composite { parts, .. } => parts.iter().map(|p| p.dim()).product(),
        }
    }

    /// True when every free state of the family is affine-closed (needed for
    /// the affine composition rule).
    pub fn is_affine(&self) -> bool {
        match self {
            FreeSet::Singleton(_)
            | FreeSet::Incoherent { .. }
            | FreeSet::Real { .. }
            | FreeSet::GroundState { .. } => true,
            FreeSet::SeparableDesk { .. } => false,
            FreeSet::Composite { rule, parts } => {
                *rule == CompositionRule::Affine && parts.iter().all(|p| p.is_affine())
            }
        }
    }
}

/// Build a composite descriptor. Requires at least two parts; the affine rule
/// is rejected for non-affine parts because partial traces could then leave
/// the free set.
pub fn compose(parts: Vec<FreeSet>, rule: CompositionRule) -> Result<FreeSet> {
    if parts.len() < 2 {
        return Err(Error::InvalidFreeSet(format!(
            "composition needs at least 2 parts, got {}",
            parts.len()
        )));
    }
    if rule == CompositionRule::Affine && !parts.iter().all(|p| p.is_affine()) {
        return Err(Error::InvalidFreeSet(
            "affine composition requires affine parts".into(),
        ));
    }
    if rule == CompositionRule::Sep && parts.len() != 2 {
        return Err(Error::InvalidFreeSet(
            "separable composition is only defined for bipartitions here".into(),
        ));
    }
    Ok(FreeSet::Composite { rule, parts })
}

/// Transform ρ into the reference basis of a family: B† ρ B.
fn into_basis(rho: &ComplexMatrix, basis: &ComplexMatrix) -> ComplexMatrix {
    basis.adjoint().matmul(rho).matmul(basis)
}

/// Split the factorization of ρ into consecutive groups matching the part
/// dimensions. Errors when the subsystems cannot be grouped that way.
fn split_by_parts(fact: &Factorization, parts: &[FreeSet]) -> Result<Vec<Vec<usize>>> {
    let mut groups = Vec::with_capacity(parts.len());
    let mut pos = 0usize;
    for part in parts {
        let target = part.dim();
        let mut acc = 1usize;
        let mut group = Vec::new();
        while acc < target {
            if pos >= fact.subsystems() {
                return Err(Error::DimensionMismatch {
                    expected: target,
                    got: acc,
                });
            }
            acc *= fact.dims()[pos];
            group.push(pos);
            pos += 1;
        }
        if acc != target {
            return Err(Error::InvalidInput(format!(
                "subsystem dimensions cannot be grouped to match part dimension {target}"
            )));
        }
        groups.push(group);
    }
    if pos != fact.subsystems() {
        return Err(Error::InvalidInput(
            "state has more subsystems than the composite parts".into(),
        ));
    }
    Ok(groups)
}

/// Partial transpose over the second block of a bipartition.
pub fn partial_transpose(rho: &ComplexMatrix, d_a: usize, d_b: usize) -> ComplexMatrix {
    assert_eq!(rho.rows, d_a * d_b);
    let mut out = ComplexMatrix::zeros(rho.rows, rho.cols);
    for ia in 0..d_a {
        for ib in 0..d_b {
            for ja in 0..d_a {
                for jb in 0..d_b {
                    out.set(ia * d_b + jb, ja * d_b + ib, rho.get(ia * d_b + ib, ja * d_b + jb));
                }
            }
        }
    }
    out
}

/// Decide membership of ρ in the family within the tolerance.
pub fn membership(rho: &DensityMatrix, family: &FreeSet, tol: f64) -> Result<MembershipReport> {
    if rho.dim() != family.dim() {
        return Err(Error::DimensionMismatch {
            expected: family.dim(),
            got: rho.dim(),
        });
    }
    match family {
        FreeSet::Singleton(gamma) => {
            let d = trace_distance(rho, gamma)?;
            if d <= tol {
                Ok(MembershipReport::member(d))
            } else {
                Ok(MembershipReport::non_member(d, Witness::TraceDistance { distance: d }))
            }
        }
        FreeSet::Incoherent { basis } => {
            let m = into_basis(&rho.mat, basis);
            let mut worst = (0usize, 0usize, 0.0f64);
            for i in 0..m.rows {
                for j in 0..m.cols {
                    if i != j && m.get(i, j).norm() > worst.2 {
                        worst = (i, j, m.get(i, j).norm());
                    }
                }
            }
            if worst.2 <= tol {
                Ok(MembershipReport::member(worst.2))
            } else {
                Ok(MembershipReport::non_member(
                    worst.2,
                    Witness::OffBasis { row: worst.0, col: worst.1, magnitude: worst.2 },
                ))
            }
        }
        FreeSet::Real { basis } => {
            let m = into_basis(&rho.mat, basis);
            let mut worst = (0usize, 0usize, 0.0f64);
            for i in 0..m.rows {
                for j in 0..m.cols {
                    if m.get(i, j).im.abs() > worst.2 {
                        worst = (i, j, m.get(i, j).im.abs());
                    }
                }
            }
            if worst.2 <= tol {
                Ok(MembershipReport::member(worst.2))
            } else {
                Ok(MembershipReport::non_member(
                    worst.2,
                    Witness::Imaginary { row: worst.0, col: worst.1, magnitude: worst.2 },
                ))
            }
        }
        FreeSet::GroundState { level, .. } => {
            let overlap = rho.mat.get(*level, *level).re;
            let deficit = 1.0 - overlap;
            if deficit <= tol {
                Ok(MembershipReport::member(deficit))
            } else {
                Ok(MembershipReport::non_member(deficit, Witness::GroundOverlap { overlap }))
            }
        }
        FreeSet::SeparableDesk { dims } => ppt_membership(&rho.mat, *dims, tol),
        FreeSet::Composite { rule, parts } => {
            composite_membership(rho, *rule, parts, tol)
        }
    }
}

fn ppt_membership(mat: &ComplexMatrix, dims: (usize, usize), tol: f64) -> Result<MembershipReport> {
    let (da, db) = dims;
    let sorted = (da.min(db), da.max(db));
    if !(sorted == (2, 2) || sorted == (2, 3)) {
        return Err(Error::Unsupported(format!(
            "separability is decided exactly only at 2⊗2 and 2⊗3, got {da}⊗{db}"
        )));
    }
    let pt = partial_transpose(mat, da, db);
    let min_eig = eigh(&pt, 1e-7)?.min_value();
    if min_eig >= -tol {
        Ok(MembershipReport::member((-min_eig).max(0.0)))
    } else {
        Ok(MembershipReport::non_member(
            -min_eig,
            Witness::PartialTransposeEig { min_eig },
        ))
    }
}

fn composite_membership(
    rho: &DensityMatrix,
    rule: CompositionRule,
    parts: &[FreeSet],
    tol: f64,
) -> Result<MembershipReport> {
    match rule {
        CompositionRule::Max => max_membership(rho, parts, tol),
        CompositionRule::Sep => {
            let max_report = max_membership(rho, parts, tol)?;
            if max_report.verdict == Verdict::NonMember {
                return Ok(max_report);
            }
            let (da, db) = (parts[0].dim(), parts[1].dim());
            let ppt = ppt_membership(&rho.mat, (da, db), tol)?;
            if ppt.verdict == Verdict::NonMember {
                return Ok(ppt);
            }
            // Both passed; Indeterminate from Max would propagate, but Max
            // membership is always decidable (recursion on memberships).
            Ok(MembershipReport::member(max_report.margin.max(ppt.margin)))
        }
        CompositionRule::Min => min_membership(rho, parts, tol),
        CompositionRule::Affine => affine_membership(rho, parts, tol),
    }
}

fn max_membership(rho: &DensityMatrix, parts: &[FreeSet], tol: f64) -> Result<MembershipReport> {
    let groups = split_by_parts(&rho.fact, parts)?;
    let mut worst = 0.0f64;
    for (idx, (part, group)) in parts.iter().zip(groups.iter()).enumerate() {
        let keep_fact = rho.fact.select(group);
        let keep_labels: Vec<&str> = keep_fact.labels().iter().map(|s| s.as_str()).collect();
        let marginal_mat = partial_trace_mat(&rho.mat, &rho.fact, &keep_labels)?;
        let marginal = DensityMatrix::with_tols(
            marginal_mat,
            keep_fact,
            rho.herm_tol,
            rho.psd_tol,
            rho.trace_tol,
        )?;
        let report = membership(&marginal, part, tol)?;
        match report.verdict {
            Verdict::Member => worst = worst.max(report.margin),
            _ => {
                let verdict = report.verdict;
                let margin = report.margin;
                let witness = Witness::MarginalViolation { part: idx, report: Box::new(report) };
                return Ok(match verdict {
                    Verdict::NonMember => MembershipReport::non_member(margin, witness),
                    _ => MembershipReport::indeterminate(margin, witness),
                });
            }
        }
    }
    Ok(MembershipReport::member(worst))
}

fn min_membership(rho: &DensityMatrix, parts: &[FreeSet], tol: f64) -> Result<MembershipReport> {
    let extremes = match span::product_generating_states(parts) {
        Some(e) => e,
        None => {
            // No finite extreme-point list (e.g. Real parts): report the
            // inner approximation honestly instead of guessing.
            let residual = f64::NAN;
            return Ok(MembershipReport::indeterminate(
                residual,
                Witness::InnerApproximation { residual },
            ));
        }
    };
    let residual = best_convex_fit_residual(&rho.mat, &extremes);
    if residual <= tol {
        Ok(MembershipReport::member(residual))
    } else {
        Ok(MembershipReport::non_member(
            residual,
            Witness::DecompositionResidual { residual },
        ))
    }
}

/// Distance min_w ‖ρ − Σ w_k E_k‖₂ over the weight simplex.
///
/// For mutually orthogonal extreme operators the minimizer is the simplex
/// projection of the overlap coefficients (exact); otherwise projected
/// gradient descent refines it.
pub(crate) fn best_convex_fit_residual(rho: &ComplexMatrix, extremes: &[ComplexMatrix]) -> f64 {
    let k = extremes.len();
    let coeff: Vec<f64> = extremes.iter().map(|e| e.hs_inner(rho).re).collect();
    // Gram matrix; orthonormal extremes give the identity.
    let mut gram = vec![vec![0.0f64; k]; k];
    let mut orthonormal = true;
    for a in 0..k {
        for b in 0..k {
            let g = extremes[a].hs_inner(&extremes[b]).re;
            gram[a][b] = g;
            let target = if a == b { 1.0 } else { 0.0 };
            if (g - target).abs() > 1e-10 {
                orthonormal = false;
            }
        }
    }
    let mut w = if orthonormal {
        project_to_simplex(&coeff)
    } else {
        vec![1.0 / k as f64; k]
    };
    if !orthonormal {
        // projected gradient on ½‖ρ − Σ w E‖² with Lipschitz step
        let lip: f64 = gram.iter().map(|row| row.iter().map(|x| x.abs()).sum::<f64>()).fold(0.0, f64::max).max(1e-12);
        for _ in 0..5000 {
            let grad: Vec<f64> = (0..k)
                .map(|a| (0..k).map(|b| gram[a][b] * w[b]).sum::<f64>() - coeff[a])
                .collect();
            let step = 1.0 / lip;
            let moved: Vec<f64> = w.iter().zip(grad.iter()).map(|(wi, gi)| wi - step * gi).collect();
            let next = project_to_simplex(&moved);
            let delta: f64 = next
                .iter()
                .zip(w.iter())
                .map(|(a, b)| (a - b).abs())
                .fold(0.0, f64::max);
            w = next;
            if delta < 1e-14 {
                break;
            }
        }
    }
    let mut fit = ComplexMatrix::zeros(rho.rows, rho.cols);
    for (wk, e) in w.iter().zip(extremes.iter()) {
        if *wk > 0.0 {
            fit = fit.add(&e.scale_re(*wk));
        }
    }
    fit.sub(rho).frobenius_norm()
}

fn affine_membership(rho: &DensityMatrix, parts: &[FreeSet], tol: f64) -> Result<MembershipReport> {
    let basis = span::product_span_basis(parts).ok_or_else(|| {
        Error::InvalidFreeSet("affine composition requires parts with a span basis".into())
    })?;
    // Orthonormal Hermitian basis: residual of ρ after projection onto span.
    let mut residual_sq = rho.mat.frobenius_norm().powi(2);
    for b in &basis {
        let c = b.hs_inner(&rho.mat);
        residual_sq -= c.norm_sqr();
    }
    let residual = residual_sq.max(0.0).sqrt();
    if residual <= tol {
        Ok(MembershipReport::member(residual))
    } else {
        Ok(MembershipReport::non_member(
            residual,
            Witness::SpanResidual { residual },
        ))
    }
}

/// Canonical informationally complete qubit POVM (tetrahedral) used where a
/// fixed reference measurement is needed.
pub fn tetrahedral_povm() -> Vec<ComplexMatrix> {
    let dirs: [[f64; 3]; 4] = [
        [1.0, 1.0, 1.0],
        [1.0, -1.0, -1.0],
        [-1.0, 1.0, -1.0],
        [-1.0, -1.0, 1.0],
    ];
    let s3 = 3.0f64.sqrt();
    dirs.iter()
        .map(|d| {
            let (x, y, z) = (d[0] / s3, d[1] / s3, d[2] / s3);
            // (I + n·σ)/4
            let mut m = ComplexMatrix::zeros(2, 2);
            m.set(0, 0, Complex64::new((1.0 + z) / 4.0, 0.0));
            m.set(1, 1, Complex64::new((1.0 - z) / 4.0, 0.0));
            m.set(0, 1, Complex64::new(x / 4.0, -y / 4.0));
            m.set(1, 0, Complex64::new(x / 4.0, y / 4.0));
            m
        })
        .collect()
}

/// Frobenius distance from ρ to the nearest state in the convex hull of the
/// family's extreme points; `None` when no finite extreme list exists.
pub fn distance_to_family(rho: &DensityMatrix, family: &FreeSet) -> Option<f64> {
    let extremes = span::generating_states(family)?;
    Some(best_convex_fit_residual(&rho.mat, &extremes))
}

/// Dephase ρ in the basis of an incoherent family (diagonal part).
pub fn dephase(rho: &ComplexMatrix, basis: &ComplexMatrix) -> ComplexMatrix {
    let m = into_basis(rho, basis);
    let mut d = ComplexMatrix::zeros(m.rows, m.cols);
    for i in 0..m.rows {
        d.set(i, i, Complex64::new(m.get(i, i).re, 0.0));
    }
    basis.matmul(&d).matmul(&basis.adjoint())
}

pub use span::{generating_states, span_basis};
