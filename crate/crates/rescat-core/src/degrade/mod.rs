//! Repeated-round catalysis simulator quantifying catalyst degradation under
//! the three error sources: system preparation, catalyst preparation, and
//! channel implementation.
//!
//! A protocol run is strictly sequential — the catalyst state carries over
//! between rounds while a fresh input is drawn each round from the noise
//! model. Identical seeds produce bit-identical traces.
//!
//! ```
//! # extern crate rescat_core;
//! use rescat_core::degrade::reproduce_example1;
//!
//! // two noisy rounds through the catalytic swap: the first shifts the
//! // catalyst by ε, the second overshoots to q₁ − ε(1 + p₂)
//! let report = reproduce_example1([0.5, 0.3, 0.2], 0.01)?;
//! assert!((report.q[0] - 5.0 / 13.0).abs() < 1e-15);
//! assert!((report.round1_analytic - (5.0 / 13.0 + 0.01)).abs() < 1e-15);
//! assert!((report.round2_analytic - (5.0 / 13.0 - 0.013)).abs() < 1e-15);
//! assert!(report.max_error < 1e-12);
//! # Ok::<(), rescat_core::Error>(())
//! ```

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::catalysis::{catalyst_marginal, split_system_catalyst};
use crate::channel::constructors::{depolarizing, swap_catalytic};
use crate::channel::{permute_to_label_order, QuantumChannel};
use crate::error::{Error, Result};
use crate::qmat::{
    eigh, partial_trace_mat, product_on_positions, trace_norm, ComplexMatrix, DensityMatrix,
};
use crate::sampling::random_state_with;

pub mod config;
pub use config::SimConfig;

/// Sign schedule of the per-round system shift.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Schedule {
    Fixed,
    Alternating,
    RandomSign,
}

/// Error source applied during a run.
#[derive(Debug, Clone)]
pub enum NoiseKind {
    /// Ideal protocol.
    None,
    /// Fresh system-preparation error each round: input = ρ + s·ε·D with the
    /// sign s drawn from the schedule. D must be traceless Hermitian and the
    /// shifted input must stay a valid state.
    SystemPrepShift {
        direction: ComplexMatrix,
        epsilon: f64,
        schedule: Schedule,
    },
    /// One-time catalyst preparation error: the run starts from the mixture
    /// (1 − ε/2)τ₀ + (ε/2)η with a seeded random η.
    CatalystPrepShift { epsilon: f64 },
    /// The dilation is mixed with the fully depolarizing channel.
    ChannelMix { weight: f64 },
}

/// Noise model: error source plus the seed driving any randomness.
#[derive(Debug, Clone)]
pub struct NoiseModel {
    pub kind: NoiseKind,
    pub seed: u64,
}

impl NoiseModel {
    pub fn none() -> Self {
        Self {
            kind: NoiseKind::None,
            seed: 0,
        }
    }
}

/// Per-round record of a protocol run.
#[derive(Debug, Clone)]
pub struct RoundTrace {
    /// 1-based round index.
    pub round: usize,
    /// ‖τ_n − τ₀‖₁ after the round, against the ideal initial catalyst.
    pub catalyst_dist: f64,
    /// System output of the round.
    pub system_out: DensityMatrix,
    /// The input actually fed into the round.
    pub input_used: DensityMatrix,
}

/// Run a sequential catalysis protocol for the given number of rounds.
///
/// For `CatalystPrepShift` the data-processing bound ‖τ_n − τ₀‖₁ ≤ ε holds
/// whenever the protocol is catalytic at the nominal input, so that
/// precondition is checked up front.
pub fn run_protocol(
    lambda: &QuantumChannel,
    tau0: &DensityMatrix,
    rho_nominal: &DensityMatrix,
    noise: &NoiseModel,
    rounds: usize,
) -> Result<Vec<RoundTrace>> {
    if rounds == 0 {
        return Err(Error::InvalidInput("at least one round is required".into()));
    }
    validate_noise(&noise.kind)?;
    let split = split_system_catalyst(lambda, tau0)?;
    if rho_nominal.fact.dims() != split.s_in_fact.dims() {
        return Err(Error::DimensionMismatch {
            expected: split.s_in_fact.total_dim(),
            got: rho_nominal.dim(),
        });
    }
    let mut rng = ChaCha8Rng::seed_from_u64(noise.seed);

    // channel used each round
    let channel = match &noise.kind {
        NoiseKind::ChannelMix { weight } => {
            let full_depol = depolarizing(1.0, lambda.in_fact.clone())?;
            QuantumChannel::mixture(&[(1.0 - weight, lambda.clone()), (*weight, full_depol)])?
        }
        _ => lambda.clone(),
    };

    // starting catalyst
    let mut tau = match &noise.kind {
        NoiseKind::CatalystPrepShift { epsilon } => {
            let nominal_marg =
                catalyst_marginal(lambda, &split, &rho_nominal.mat, tau0)?;
            let nominal_err = trace_norm(&nominal_marg.sub(&tau0.mat))?;
            if nominal_err > 1e-9 {
                return Err(Error::Precondition(format!(
                    "catalyst-preparation bound needs catalysis at the nominal input (error {nominal_err:.3e})"
                )));
            }
            let eta = random_state_with(&tau0.fact, &mut rng);
            let mixed = tau0
                .mat
                .scale_re(1.0 - epsilon / 2.0)
                .add(&eta.mat.scale_re(epsilon / 2.0));
            tau0.replace_mat(mixed)?
        }
        _ => tau0.clone(),
    };

    let mut traces = Vec::with_capacity(rounds);
    let mut sign = 1.0f64;
    for round in 1..=rounds {
        let input_used = match &noise.kind {
            NoiseKind::SystemPrepShift {
                direction,
                epsilon,
                schedule,
            } => {
                let s = match schedule {
                    Schedule::Fixed => 1.0,
                    Schedule::Alternating => {
                        let current = sign;
                        sign = -sign;
                        current
                    }
                    Schedule::RandomSign => {
                        use rand::Rng;
                        if rng.gen_bool(0.5) {
                            1.0
                        } else {
                            -1.0
                        }
                    }
                };
                let shifted = rho_nominal.mat.add(&direction.scale_re(s * epsilon));
                rho_nominal.replace_mat(shifted).map_err(|_| {
                    Error::InvalidInput(
                        "system shift leaves the state space; cap ε by the smallest nominal eigenvalue".into(),
                    )
                })?
            }
            _ => rho_nominal.clone(),
        };

        // evolve: joint input with the carried catalyst
        let tau_aligned = permute_to_label_order(&tau.mat, &tau.fact, split.c_in_fact.labels())?;
        let joint = product_on_positions(
            &channel.in_fact,
            &input_used.mat,
            &split.s_in_pos,
            &tau_aligned,
            &split.c_in_pos,
        );
        let out = channel.apply_mat(&joint);

        let c_labels: Vec<&str> = split.c_in_fact.labels().iter().map(|s| s.as_str()).collect();
        let tau_next_mat = partial_trace_mat(&out, &channel.out_fact, &c_labels)?;
        let out_c_pos = channel.out_fact.positions_of(&c_labels)?;
        let out_c_fact = channel.out_fact.select(&out_c_pos);
        let tau_next_mat = permute_to_label_order(&tau_next_mat, &out_c_fact, tau0.fact.labels())?;
        tau = tau0.replace_mat(scrub(&tau_next_mat))?;

        let s_labels: Vec<&str> = split.s_out_labels.iter().map(|s| s.as_str()).collect();
        let sys_mat = partial_trace_mat(&out, &channel.out_fact, &s_labels)?;
        let s_pos = channel.out_fact.positions_of(&s_labels)?;
        let system_out = DensityMatrix::with_tols(
            scrub(&sys_mat),
            channel.out_fact.select(&s_pos),
            1e-7,
            1e-7,
            1e-7,
        )?;

        let catalyst_dist = trace_norm(&tau.mat.sub(&tau0.mat))?;
        traces.push(RoundTrace {
            round,
            catalyst_dist,
            system_out,
            input_used,
        });
    }
    Ok(traces)
}

/// Remove numerical dust so long runs do not accumulate Hermiticity drift.
fn scrub(m: &ComplexMatrix) -> ComplexMatrix {
    m.hermitian_part()
}

fn validate_noise(kind: &NoiseKind) -> Result<()> {
    let eps = match kind {
        NoiseKind::None => return Ok(()),
        NoiseKind::SystemPrepShift { epsilon, direction, .. } => {
            if direction.trace().norm() > 1e-9 || direction.herm_deviation() > 1e-9 {
                return Err(Error::InvalidInput(
                    "shift direction must be traceless Hermitian".into(),
                ));
            }
            *epsilon
        }
        NoiseKind::CatalystPrepShift { epsilon } => *epsilon,
        NoiseKind::ChannelMix { weight } => {
            if !(0.0..=1.0).contains(weight) {
                return Err(Error::InvalidInput("mix weight outside [0, 1]".into()));
            }
            return Ok(());
        }
    };
    if !(0.0..=2.0).contains(&eps) {
        return Err(Error::InvalidInput(format!(
            "noise amplitude {eps} outside [0, 2]"
        )));
    }
    Ok(())
}

/// Analytic and simulated two-round degradation of the catalytic swap.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct Example1Report {
    /// Catalyst distribution solved from (p₁+p₂)q₁ = (p₂+p₃)q₂.
    pub q: [f64; 2],
    /// q₁ after round 1 (analytic: q₁ + ε).
    pub round1_analytic: f64,
    /// q₁ after round 2 (analytic: q₁ − ε(1+p₂)).
    pub round2_analytic: f64,
    pub round1_sim: f64,
    pub round2_sim: f64,
    /// max |analytic − simulated| over both rounds.
    pub max_error: f64,
}

/// Reproduce the two-round arithmetic of the catalytic-swap example: round 1
/// uses the input diag(p₁−ε, p₂, p₃+ε), round 2 uses diag(p₁+ε, p₂, p₃−ε)
/// with the degraded catalyst carried over.
pub fn reproduce_example1(p: [f64; 3], epsilon: f64) -> Result<Example1Report> {
    let total: f64 = p.iter().sum();
    if (total - 1.0).abs() > 1e-12 || p.iter().any(|&x| x <= 0.0) {
        return Err(Error::InvalidInput("p must be a strictly positive distribution".into()));
    }
    if epsilon < 0.0 || epsilon >= p[0].min(p[2]) {
        return Err(Error::InvalidInput(
            "ε must be nonnegative and below min(p₁, p₃)".into(),
        ));
    }
    let q1 = (p[1] + p[2]) / (1.0 + p[1]);
    let q = [q1, 1.0 - q1];

    let lambda = swap_catalytic()?;
    let tau0 = DensityMatrix::from_probs(&q, "C")?;
    let split = split_system_catalyst(&lambda, &tau0)?;

    let round = |tau: &DensityMatrix, input: &[f64; 3]| -> Result<DensityMatrix> {
        let rho = DensityMatrix::from_probs(input, "S")?;
        let marg = catalyst_marginal(&lambda, &split, &rho.mat, tau)?;
        tau0.replace_mat(marg)
    };

    let input1 = [p[0] - epsilon, p[1], p[2] + epsilon];
    let tau1 = round(&tau0, &input1)?;
    let input2 = [p[0] + epsilon, p[1], p[2] - epsilon];
    let tau2 = round(&tau1, &input2)?;

    let round1_sim = tau1.mat.get(0, 0).re;
    let round2_sim = tau2.mat.get(0, 0).re;
    let round1_analytic = q1 + epsilon;
    let round2_analytic = q1 - epsilon * (1.0 + p[1]);
    let max_error = (round1_sim - round1_analytic)
        .abs()
        .max((round2_sim - round2_analytic).abs());
    Ok(Example1Report {
        q,
        round1_analytic,
        round2_analytic,
        round1_sim,
        round2_sim,
        max_error,
    })
}

/// CSV rendering of a trace: `round,catalyst_dist,input_perturbation`.
pub fn trace_csv(traces: &[RoundTrace], rho_nominal: &DensityMatrix) -> String {
    let mut out = String::from("round,catalyst_dist,input_perturbation\n");
    for t in traces {
        let perturbation = trace_norm(&t.input_used.mat.sub(&rho_nominal.mat)).unwrap_or(f64::NAN);
        out.push_str(&format!(
            "{},{:.17e},{:.17e}\n",
            t.round, t.catalyst_dist, perturbation
        ));
    }
    out
}

/// Guard against drift in long runs: eigenvalues must stay near [0, 1].
pub fn trace_is_physical(traces: &[RoundTrace]) -> bool {
    traces.iter().all(|t| {
        eigh(&t.system_out.mat, 1e-6)
            .map(|e| e.min_value() > -1e-7)
            .unwrap_or(false)
    })
}

#[cfg(test)]
mod tests;
