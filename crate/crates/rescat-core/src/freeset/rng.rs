//! Resource non-generation checks for channels.

use serde::{Deserialize, Serialize};

use super::span::{is_linear_type, spanning_free_states};
use super::{membership, CompositionRule, FreeSet, MembershipReport, Verdict};
use crate::channel::QuantumChannel;
use crate::error::{Error, Result};
use crate::qmat::{ComplexMatrix, DensityMatrix};

/// How the free inputs are enumerated.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RngStrategy {
    /// Pick extreme points when finite, else a spanning family.
    Auto,
    /// Force the finite extreme-point route.
    ExtremePoints,
    /// Force the spanning-family route.
    SpanningFamily,
}

/// Report of a resource non-generation check.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct RngReport {
    /// Does the channel map the free inputs into the free outputs?
    pub rng: Verdict,
    /// Complete non-generation status: equals `rng` when the output family is
    /// composed by the Min, Sep or Max rule (RNG = CRNG there); otherwise the
    /// verdict is only about RNG and this field stays `Indeterminate`.
    pub crng: Verdict,
    /// Output-membership margin for every checked input.
    pub margins: Vec<f64>,
    /// First violating input, with the failed membership report.
    pub witness: Option<(usize, MembershipReport)>,
}

/// Check whether a channel is resource non-generating from `f_in` to `f_out`.
///
/// For input families with a finite generating set the check is exact for any
/// convex output family (linearity + convexity). For continuous input
/// families with a spanning family of free states (the real states), the
/// check is exact when the output family is a subspace-type set. Otherwise
/// the verdict is `Indeterminate`.
pub fn is_rng(
    ch: &QuantumChannel,
    f_in: &FreeSet,
    f_out: &FreeSet,
    strategy: RngStrategy,
    tol: f64,
) -> Result<RngReport> {
    if ch.in_dim() != f_in.dim() {
        return Err(Error::DimensionMismatch {
            expected: f_in.dim(),
            got: ch.in_dim(),
        });
    }
    if ch.out_dim() != f_out.dim() {
        return Err(Error::DimensionMismatch {
            expected: f_out.dim(),
            got: ch.out_dim(),
        });
    }

    let finite = super::span::generating_states(f_in);
    let inputs: Vec<ComplexMatrix> = match strategy {
        RngStrategy::ExtremePoints => match finite {
            Some(g) => g,
            None => return Ok(indeterminate_report()),
        },
        RngStrategy::SpanningFamily => match spanning_family_checked(f_in, f_out) {
            Some(f) => f,
            None => return Ok(indeterminate_report()),
        },
        RngStrategy::Auto => match finite {
            Some(g) => g,
            None => match spanning_family_checked(f_in, f_out) {
                Some(f) => f,
                None => return Ok(indeterminate_report()),
            },
        },
    };

    let mut margins = Vec::with_capacity(inputs.len());
    let mut witness = None;
    let mut rng = Verdict::Member;
    for (idx, input) in inputs.iter().enumerate() {
        let state = DensityMatrix::with_tols(input.clone(), input_fact(ch), 1e-7, 1e-7, 1e-7)?;
        let out = ch.apply(&state)?;
        let report = membership(&out, f_out, tol)?;
        margins.push(report.margin);
        match report.verdict {
            Verdict::Member => {}
            Verdict::NonMember => {
                rng = Verdict::NonMember;
                witness = Some((idx, report));
                break;
            }
            Verdict::Indeterminate => {
                if rng == Verdict::Member {
                    rng = Verdict::Indeterminate;
                    witness = Some((idx, report));
                }
            }
        }
    }

    let crng = match rng {
        Verdict::Member if output_rule_collapses_crng(f_out) => Verdict::Member,
        Verdict::NonMember => Verdict::NonMember, // not even RNG
        _ => Verdict::Indeterminate,
    };

    Ok(RngReport {
        rng,
        crng,
        margins,
        witness,
    })
}

fn input_fact(ch: &QuantumChannel) -> crate::qmat::Factorization {
    ch.in_fact.clone()
}

fn indeterminate_report() -> RngReport {
    RngReport {
        rng: Verdict::Indeterminate,
        crng: Verdict::Indeterminate,
        margins: vec![],
        witness: None,
    }
}

fn spanning_family_checked(f_in: &FreeSet, f_out: &FreeSet) -> Option<Vec<ComplexMatrix>> {
    let family = spanning_free_states(f_in)?;
    if is_linear_type(f_out) {
        Some(family)
    } else {
        None
    }
}

/// RNG = CRNG for the extremal composition rules (minimal, separable,
/// maximal); for other output families the lemma does not apply.
fn output_rule_collapses_crng(f_out: &FreeSet) -> bool {
    matches!(
        f_out,
        FreeSet::Composite {
            rule: CompositionRule::Min | CompositionRule::Sep | CompositionRule::Max,
            ..
        }
    )
}
