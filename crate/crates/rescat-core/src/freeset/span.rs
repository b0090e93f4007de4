//! Extreme-point and span machinery for free-state families.
//!
//! Two notions drive the exact checks elsewhere:
//!
//! - a *generating set*: finitely many free states whose convex hull is the
//!   whole family (basis projectors for incoherent sets, the ground
//!   projector, a singleton, and products of these for Min composites);
//! - a *span basis*: an orthonormal Hermitian basis of the family's linear
//!   span, available for families of the form (subspace ∩ states). Checking
//!   a channel on a spanning family of free states is then exact by
//!   linearity.

use super::{CompositionRule, FreeSet};
use crate::qmat::{basis_ket, outer, Complex64, ComplexMatrix};

/// Finite list of free states whose convex hull equals the family, if one
/// exists.
pub fn generating_states(family: &FreeSet) -> Option<Vec<ComplexMatrix>> {
    match family {
        FreeSet::Singleton(g) => Some(vec![g.mat.clone()]),
        FreeSet::Incoherent { basis } => Some(
            (0..basis.rows)
                .map(|i| {
                    let col = basis.column(i);
                    outer(&col, &col)
                })
                .collect(),
        ),
        FreeSet::GroundState { dim, level } => {
            let v = basis_ket(*dim, *level);
            Some(vec![outer(&v, &v)])
        }
        FreeSet::Real { .. } | FreeSet::SeparableDesk { .. } => None,
        FreeSet::Composite { rule, parts } => match rule {
            CompositionRule::Min => product_generating_states(parts),
            _ => None,
        },
    }
}

/// Cartesian products of the parts' generating states.
pub fn product_generating_states(parts: &[FreeSet]) -> Option<Vec<ComplexMatrix>> {
    let mut acc: Vec<ComplexMatrix> = vec![ComplexMatrix::identity(1)];
    for part in parts {
        let gens = generating_states(part)?;
        let mut next = Vec::with_capacity(acc.len() * gens.len());
        for a in &acc {
            for g in &gens {
                next.push(a.kron(g));
            }
        }
        acc = next;
    }
    Some(acc)
}

/// Orthonormal Hermitian basis of the family's linear span, for families that
/// are exactly (span ∩ states). `None` when the family has no such form.
pub fn span_basis(family: &FreeSet) -> Option<Vec<ComplexMatrix>> {
    match family {
        FreeSet::Singleton(g) => {
            let norm = g.mat.frobenius_norm();
            Some(vec![g.mat.scale_re(1.0 / norm)])
        }
        FreeSet::Incoherent { basis } => Some(
            (0..basis.rows)
                .map(|i| {
                    let col = basis.column(i);
                    outer(&col, &col)
                })
                .collect(),
        ),
        FreeSet::GroundState { dim, level } => {
            let v = basis_ket(*dim, *level);
            Some(vec![outer(&v, &v)])
        }
        FreeSet::Real { basis } => {
            let d = basis.rows;
            let mut out = Vec::with_capacity(d * (d + 1) / 2);
            for i in 0..d {
                let ci = basis.column(i);
                out.push(outer(&ci, &ci));
            }
            let s = std::f64::consts::FRAC_1_SQRT_2;
            for i in 0..d {
                for j in (i + 1)..d {
                    let ci = basis.column(i);
                    let cj = basis.column(j);
                    // (|i⟩⟨j| + |j⟩⟨i|)/√2
                    out.push(outer(&ci, &cj).add(&outer(&cj, &ci)).scale_re(s));
                }
            }
            Some(out)
        }
        FreeSet::SeparableDesk { .. } => None,
        FreeSet::Composite { rule, parts } => match rule {
            CompositionRule::Affine => product_span_basis(parts),
            // A Min composite equals (span ∩ states) when its extreme points
            // are mutually orthogonal (basis-projector products); then the
            // positivity of coefficients is forced and conv = span ∩ states.
            CompositionRule::Min => {
                let gens = product_generating_states(parts)?;
                if mutually_orthonormal(&gens) {
                    Some(gens)
                } else {
                    None
                }
            }
            _ => None,
        },
    }
}

/// Products of the parts' span bases (orthonormality is preserved by the
/// Kronecker product).
pub fn product_span_basis(parts: &[FreeSet]) -> Option<Vec<ComplexMatrix>> {
    let mut acc: Vec<ComplexMatrix> = vec![ComplexMatrix::identity(1)];
    for part in parts {
        let basis = span_basis(part)?;
        let mut next = Vec::with_capacity(acc.len() * basis.len());
        for a in &acc {
            for b in &basis {
                next.push(a.kron(b));
            }
        }
        acc = next;
    }
    Some(acc)
}

fn mutually_orthonormal(ops: &[ComplexMatrix]) -> bool {
    for (i, a) in ops.iter().enumerate() {
        for (j, b) in ops.iter().enumerate() {
            let target = if i == j { 1.0 } else { 0.0 };
            if (a.hs_inner(b).re - target).abs() > 1e-10 || a.hs_inner(b).im.abs() > 1e-10 {
                return false;
            }
        }
    }
    true
}

/// A family of free *states* spanning the same operator subspace as the
/// family itself; exists for every family with a span basis and for Min
/// composites of such. Used for exact linear-extension checks.
pub fn spanning_free_states(family: &FreeSet) -> Option<Vec<ComplexMatrix>> {
    if let Some(gens) = generating_states(family) {
        return Some(gens);
    }
    match family {
        FreeSet::Real { basis } => {
            let d = basis.rows;
            let mut out = Vec::new();
            for i in 0..d {
                let ci = basis.column(i);
                out.push(outer(&ci, &ci));
            }
            for i in 0..d {
                for j in (i + 1)..d {
                    let ci = basis.column(i);
                    let cj = basis.column(j);
                    let plus: Vec<Complex64> = ci
                        .iter()
                        .zip(cj.iter())
                        .map(|(a, b)| (a + b).unscale(2.0f64.sqrt()))
                        .collect();
                    out.push(outer(&plus, &plus));
                }
            }
            Some(out)
        }
        FreeSet::Composite { rule, parts } if *rule == CompositionRule::Min => {
            let mut acc: Vec<ComplexMatrix> = vec![ComplexMatrix::identity(1)];
            for part in parts {
                let fam = spanning_free_states(part)?;
                let mut next = Vec::with_capacity(acc.len() * fam.len());
                for a in &acc {
                    for f in &fam {
                        next.push(a.kron(f));
                    }
                }
                acc = next;
            }
            Some(acc)
        }
        _ => None,
    }
}

/// True for families that are exactly (linear subspace ∩ states), where a
/// spanning-family argument gives exact conclusions.
pub fn is_linear_type(family: &FreeSet) -> bool {
    span_basis(family).is_some()
}
