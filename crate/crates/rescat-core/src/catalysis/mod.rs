//! Decision procedures for catalytic channels, robustness witnesses,
//! catalysis ↔ broadcasting converters and the built-in example suite.
//!
//! Conventions: a dilation acts on S ⊗ C and outputs S' ⊗ C; the catalyst
//! subsystems are identified by the labels of the catalyst state in both the
//! input and output factorizations.
//!
//! ```
//! # extern crate rescat_core;
//! use rescat_core::catalysis::{builtin_example, is_catalytic_channel, robustness_witness,
//!     CatalysisInstance};
//! use rescat_core::qmat::DensityMatrix;
//!
//! // the fine-tuned swap is catalytic only at its design point
//! let ex = builtin_example("swap_example1")?;
//! let report = is_catalytic_channel(&ex.dilation, &ex.catalyst, 1e-9)?;
//! assert!(!report.catalytic);
//!
//! // an ε-ball perturbation witnesses the degradation, with the error
//! // matching the linearity prediction (ε/2)·‖τ' − τ‖₁
//! let inst = CatalysisInstance::new(ex.dilation, ex.catalyst, ex.nominal_input, 0.02)?;
//! let eta = DensityMatrix::from_probs(&[0.49, 0.30, 0.21], "S")?;
//! let witness = robustness_witness(&inst, &eta)?;
//! assert!(witness.catalyst_error > 0.0);
//! assert!((witness.catalyst_error - witness.predicted_error).abs() < 1e-12);
//! # Ok::<(), rescat_core::Error>(())
//! ```

use serde::{Deserialize, Serialize};

use crate::channel::{permute_to_label_order, QuantumChannel};
use crate::error::{Error, Result};
use crate::freeset::{membership, FreeSet, MembershipReport, Verdict};
use crate::monotone::{dmax, rel_ent_resource, MonotoneResult};
use crate::qmat::{
    basis_ket, outer, partial_trace_mat, product_on_positions, trace_norm, Complex64,
    ComplexMatrix, DensityMatrix, Factorization,
};

pub mod builtin;
pub mod construct;
pub mod convert;

pub use builtin::{builtin_example, run_builtin_check, BuiltinExample, ExampleCheck};
pub use construct::{construct_dmax_broadcast, DmaxBroadcast};
pub use convert::{convert, ConvertDirection};

/// A robust-catalysis problem instance: dilation, catalyst, nominal input and
/// robustness radius.
#[derive(Debug, Clone)]
pub struct CatalysisInstance {
    pub dilation: QuantumChannel,
    pub catalyst: DensityMatrix,
    pub nominal_input: DensityMatrix,
    pub epsilon: f64,
}

impl CatalysisInstance {
    pub fn new(
        dilation: QuantumChannel,
        catalyst: DensityMatrix,
        nominal_input: DensityMatrix,
        epsilon: f64,
    ) -> Result<Self> {
        if !(0.0..=2.0).contains(&epsilon) {
            return Err(Error::InvalidInput(format!(
                "robustness radius {epsilon} outside [0, 2] (trace-norm diameter)"
            )));
        }
        let c_labels: Vec<&str> = catalyst.labels().iter().map(|s| s.as_str()).collect();
        dilation.in_fact.positions_of(&c_labels)?;
        dilation.out_fact.positions_of(&c_labels)?;
        let split = split_system_catalyst(&dilation, &catalyst)?;
        if split.s_in_fact.dims() != nominal_input.fact.dims() {
            return Err(Error::DimensionMismatch {
                expected: split.s_in_fact.total_dim(),
                got: nominal_input.dim(),
            });
        }
        Ok(Self {
            dilation,
            catalyst,
            nominal_input,
            epsilon,
        })
    }
}

/// A broadcast problem instance: channel C → S'C, broadcast state, output
/// free family on S'.
#[derive(Debug, Clone)]
pub struct BroadcastInstance {
    pub channel: QuantumChannel,
    pub state: DensityMatrix,
    pub freeset_out: FreeSet,
}

/// Positions of the system and catalyst subsystems in a dilation.
pub(crate) struct SystemCatalystSplit {
    pub s_in_pos: Vec<usize>,
    pub c_in_pos: Vec<usize>,
    pub s_in_fact: Factorization,
    pub c_in_fact: Factorization,
    pub s_out_labels: Vec<String>,
}

pub(crate) fn split_system_catalyst(
    lambda: &QuantumChannel,
    tau: &DensityMatrix,
) -> Result<SystemCatalystSplit> {
    let c_labels: Vec<&str> = tau.labels().iter().map(|s| s.as_str()).collect();
    let c_in_pos = lambda.in_fact.positions_of(&c_labels)?;
    if c_in_pos.len() != c_labels.len() {
        return Err(Error::InvalidInput("duplicate catalyst labels".into()));
    }
    let s_in_pos: Vec<usize> = (0..lambda.in_fact.subsystems())
        .filter(|p| !c_in_pos.contains(p))
        .collect();
    if s_in_pos.is_empty() {
        return Err(Error::InvalidInput("dilation has no system input".into()));
    }
    let s_in_fact = lambda.in_fact.select(&s_in_pos);
    let c_in_fact = lambda.in_fact.select(&c_in_pos);
    if c_in_fact.dims() != tau.fact.dims() {
        return Err(Error::DimensionMismatch {
            expected: c_in_fact.total_dim(),
            got: tau.dim(),
        });
    }
    let s_out_labels: Vec<String> = lambda
        .out_fact
        .labels()
        .iter()
        .filter(|l| !c_labels.contains(&l.as_str()))
        .cloned()
        .collect();
    Ok(SystemCatalystSplit {
        s_in_pos,
        c_in_pos,
        s_in_fact,
        c_in_fact,
        s_out_labels,
    })
}

/// Catalyst marginal of Λ(x_S ⊗ τ_C), returned in the label order of τ.
pub(crate) fn catalyst_marginal(
    lambda: &QuantumChannel,
    split: &SystemCatalystSplit,
    x_s: &ComplexMatrix,
    tau: &DensityMatrix,
) -> Result<ComplexMatrix> {
    let tau_mat = permute_to_label_order(&tau.mat, &tau.fact, split.c_in_fact.labels())?;
    let input = product_on_positions(
        &lambda.in_fact,
        x_s,
        &split.s_in_pos,
        &tau_mat,
        &split.c_in_pos,
    );
    let out = lambda.apply_mat(&input);
    let c_labels: Vec<&str> = split.c_in_fact.labels().iter().map(|s| s.as_str()).collect();
    let marg = partial_trace_mat(&out, &lambda.out_fact, &c_labels)?;
    let out_c_fact = {
        let pos = lambda.out_fact.positions_of(&c_labels)?;
        lambda.out_fact.select(&pos)
    };
    permute_to_label_order(&marg, &out_c_fact, tau.fact.labels())
}

/// Report of the input-agnostic catalysis check.
#[derive(Debug, Clone)]
pub struct CatalyticReport {
    pub catalytic: bool,
    /// Largest catalyst deviation over the Hermitian operator basis of S.
    pub max_deviation: f64,
    /// A density matrix realizing the worst deviation.
    pub worst_state: DensityMatrix,
    /// Catalyst deviation produced by `worst_state`.
    pub worst_error: f64,
}

/// Decide whether Tr_{S'}[Λ(ρ_S ⊗ τ_C)] = τ_C for every input ρ_S.
///
/// By linearity it suffices to check a Hermitian operator basis of S; the
/// canonical basis {|i⟩⟨i|} ∪ {(|i⟩⟨j|+|j⟩⟨i|)/√2} ∪ {i(|i⟩⟨j|−|j⟩⟨i|)/√2}
/// is used, with the deviation aggregated as the max trace norm over
/// elements. The worst basis element is converted to a witness density
/// matrix by evaluating the associated superposition projectors.
pub fn is_catalytic_channel(
    lambda: &QuantumChannel,
    tau: &DensityMatrix,
    tol: f64,
) -> Result<CatalyticReport> {
    let split = split_system_catalyst(lambda, tau)?;
    let d_s = split.s_in_fact.total_dim();

    let deviation = |x: &ComplexMatrix| -> Result<f64> {
        let marg = catalyst_marginal(lambda, &split, x, tau)?;
        let expected = tau.mat.scale_re(x.trace().re);
        // the basis elements are Hermitian, so the difference is too
        trace_norm(&marg.sub(&expected))
    };

    let mut max_deviation = 0.0f64;
    for b in hermitian_basis(d_s) {
        max_deviation = max_deviation.max(deviation(&b)?);
    }

    // witness search over the spanning pure states
    let mut worst: Option<(DensityMatrix, f64)> = None;
    for ket in spanning_pure_states(d_s) {
        let proj = outer(&ket, &ket);
        let dev = deviation(&proj)?;
        let better = match &worst {
            None => true,
            Some((_, best)) => dev > *best,
        };
        if better {
            let state = DensityMatrix::with_tols(proj, split.s_in_fact.clone(), 1e-7, 1e-7, 1e-7)?;
            worst = Some((state, dev));
        }
    }
    let (worst_state, worst_error) = worst.expect("nonempty spanning family");

    Ok(CatalyticReport {
        catalytic: max_deviation <= tol,
        max_deviation,
        worst_state,
        worst_error,
    })
}

/// Canonical Hermitian operator basis of dimension d (d² elements).
pub fn hermitian_basis(d: usize) -> Vec<ComplexMatrix> {
    let s = std::f64::consts::FRAC_1_SQRT_2;
    let mut out = Vec::with_capacity(d * d);
    for i in 0..d {
        let e = basis_ket(d, i);
        out.push(outer(&e, &e));
    }
    for i in 0..d {
        for j in (i + 1)..d {
            let ei = basis_ket(d, i);
            let ej = basis_ket(d, j);
            out.push(outer(&ei, &ej).add(&outer(&ej, &ei)).scale_re(s));
            out.push(
                outer(&ei, &ej)
                    .sub(&outer(&ej, &ei))
                    .scale(Complex64::new(0.0, s)),
            );
        }
    }
    out
}

/// Pure states spanning the Hermitian operators: basis states plus the
/// pairwise ± and ±i superpositions.
pub fn spanning_pure_states(d: usize) -> Vec<Vec<Complex64>> {
    let s = std::f64::consts::FRAC_1_SQRT_2;
    let mut out = Vec::new();
    for i in 0..d {
        out.push(basis_ket(d, i));
    }
    for i in 0..d {
        for j in (i + 1)..d {
            let mut plus = vec![Complex64::new(0.0, 0.0); d];
            plus[i] = Complex64::new(s, 0.0);
            plus[j] = Complex64::new(s, 0.0);
            out.push(plus);
            let mut plus_i = vec![Complex64::new(0.0, 0.0); d];
            plus_i[i] = Complex64::new(s, 0.0);
            plus_i[j] = Complex64::new(0.0, s);
            out.push(plus_i);
        }
    }
    out
}

/// Robustness witness built from the contradiction argument: mix the nominal
/// input with an arbitrary state η inside the ε-ball and measure the catalyst
/// error of the mixture. A strictly positive error certifies that the
/// instance is not robust.
#[derive(Debug, Clone)]
pub struct RobustnessWitness {
    /// The perturbed input (1 − ε/2)ρ + (ε/2)η.
    pub mixture: DensityMatrix,
    /// ‖Tr_{S'}[Λ(mixture ⊗ τ)] − τ‖₁, measured by simulation.
    pub catalyst_error: f64,
    /// (ε/2)·‖Tr_{S'}[Λ(η ⊗ τ)] − τ‖₁, the linearity prediction.
    pub predicted_error: f64,
}

pub fn robustness_witness(
    inst: &CatalysisInstance,
    eta: &DensityMatrix,
) -> Result<RobustnessWitness> {
    let split = split_system_catalyst(&inst.dilation, &inst.catalyst)?;
    // precondition: catalysis holds at the nominal input
    let nominal_marg = catalyst_marginal(&inst.dilation, &split, &inst.nominal_input.mat, &inst.catalyst)?;
    let nominal_err = trace_norm(&nominal_marg.sub(&inst.catalyst.mat))?;
    if nominal_err > 1e-9 {
        return Err(Error::Precondition(format!(
            "catalysis does not hold at the nominal input (error {nominal_err:.3e})"
        )));
    }
    if eta.fact.dims() != inst.nominal_input.fact.dims() {
        return Err(Error::DimensionMismatch {
            expected: inst.nominal_input.dim(),
            got: eta.dim(),
        });
    }
    let half = inst.epsilon / 2.0;
    let mix_mat = inst
        .nominal_input
        .mat
        .scale_re(1.0 - half)
        .add(&eta.mat.scale_re(half));
    let mixture = inst.nominal_input.replace_mat(mix_mat)?;
    let mixture_marg = catalyst_marginal(&inst.dilation, &split, &mixture.mat, &inst.catalyst)?;
    let catalyst_error = trace_norm(&mixture_marg.sub(&inst.catalyst.mat))?;
    let eta_marg = catalyst_marginal(&inst.dilation, &split, &eta.mat, &inst.catalyst)?;
    let predicted_error = half * trace_norm(&eta_marg.sub(&inst.catalyst.mat))?;
    Ok(RobustnessWitness {
        mixture,
        catalyst_error,
        predicted_error,
    })
}

/// Report of a broadcast verification.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct BroadcastReport {
    /// Is the broadcast state left fully intact on its system?
    pub intact: bool,
    pub intact_error: f64,
    /// Membership verdict of the broadcast marginal in the output family.
    pub output_verdict: Verdict,
    pub output_report: MembershipReport,
    /// Resource broadcast = intact and non-free marginal.
    pub resourceful: bool,
}

/// Check that B leaves τ intact on its own system and examine whether the
/// other output marginal is resourceful (non-free).
pub fn verify_broadcast(
    b: &QuantumChannel,
    tau: &DensityMatrix,
    f_out: &FreeSet,
    tol: f64,
) -> Result<BroadcastReport> {
    if b.in_fact.dims() != tau.fact.dims() {
        return Err(Error::DimensionMismatch {
            expected: b.in_fact.total_dim(),
            got: tau.dim(),
        });
    }
    let out = b.apply(tau)?;
    let c_labels: Vec<&str> = tau.labels().iter().map(|s| s.as_str()).collect();
    let kept_c = partial_trace_mat(&out.mat, &b.out_fact, &c_labels)?;
    let out_c_fact = {
        let pos = b.out_fact.positions_of(&c_labels)?;
        b.out_fact.select(&pos)
    };
    let kept_c = permute_to_label_order(&kept_c, &out_c_fact, tau.fact.labels())?;
    let intact_error = trace_norm(&kept_c.sub(&tau.mat))?;
    let intact = intact_error <= tol;

    let s_labels: Vec<&str> = b
        .out_fact
        .labels()
        .iter()
        .filter(|l| !c_labels.contains(&l.as_str()))
        .map(|l| l.as_str())
        .collect();
    let s_pos = b.out_fact.positions_of(&s_labels)?;
    let s_fact = b.out_fact.select(&s_pos);
    let s_marg = partial_trace_mat(&out.mat, &b.out_fact, &s_labels)?;
    let s_state = DensityMatrix::with_tols(s_marg, s_fact, 1e-7, 1e-7, 1e-7)?;
    let output_report = membership(&s_state, f_out, tol)?;
    let output_verdict = output_report.verdict;
    Ok(BroadcastReport {
        intact,
        intact_error,
        output_verdict,
        output_report,
        resourceful: intact && output_verdict == Verdict::NonMember,
    })
}

/// Report of the strict-catalysis check.
#[derive(Debug, Clone)]
pub struct StrictReport {
    pub strict: bool,
    /// ‖Λ(ρ⊗τ) − Tr_C[Λ(ρ⊗τ)] ⊗ τ‖₁.
    pub correlation_norm: f64,
    /// ‖Tr_{S'}[Λ(ρ⊗τ)] − τ‖₁.
    pub catalyst_error: f64,
    /// System output state Tr_C[Λ(ρ⊗τ)].
    pub system_output: DensityMatrix,
}

/// Strict catalysis: the catalyst returns exactly and no system–catalyst
/// correlations are established.
pub fn verify_strict(
    lambda: &QuantumChannel,
    rho: &DensityMatrix,
    tau: &DensityMatrix,
    tol: f64,
) -> Result<StrictReport> {
    let split = split_system_catalyst(lambda, tau)?;
    if rho.fact.dims() != split.s_in_fact.dims() {
        return Err(Error::DimensionMismatch {
            expected: split.s_in_fact.total_dim(),
            got: rho.dim(),
        });
    }
    let tau_mat = permute_to_label_order(&tau.mat, &tau.fact, split.c_in_fact.labels())?;
    let input = product_on_positions(
        &lambda.in_fact,
        &rho.mat,
        &split.s_in_pos,
        &tau_mat,
        &split.c_in_pos,
    );
    let chi = lambda.apply_mat(&input);

    let c_labels: Vec<&str> = split.c_in_fact.labels().iter().map(|s| s.as_str()).collect();
    let tau_out = partial_trace_mat(&chi, &lambda.out_fact, &c_labels)?;
    let out_c_fact = {
        let pos = lambda.out_fact.positions_of(&c_labels)?;
        lambda.out_fact.select(&pos)
    };
    let tau_out = permute_to_label_order(&tau_out, &out_c_fact, tau.fact.labels())?;
    let catalyst_error = trace_norm(&tau_out.sub(&tau.mat))?;

    let s_labels: Vec<&str> = split.s_out_labels.iter().map(|s| s.as_str()).collect();
    let sys_mat = partial_trace_mat(&chi, &lambda.out_fact, &s_labels)?;
    let s_pos = lambda.out_fact.positions_of(&s_labels)?;
    let s_fact = lambda.out_fact.select(&s_pos);
    let system_output = DensityMatrix::with_tols(sys_mat, s_fact, 1e-7, 1e-7, 1e-7)?;

    // product comparison against the *initial* catalyst state
    let c_out_pos = lambda.out_fact.positions_of(&c_labels)?;
    let tau_out_order = permute_to_label_order(&tau.mat, &tau.fact, out_c_fact.labels())?;
    let product = product_on_positions(
        &lambda.out_fact,
        &system_output.mat,
        &lambda.out_fact.positions_of(&s_labels)?,
        &tau_out_order,
        &c_out_pos,
    );
    let correlation_norm = trace_norm(&chi.sub(&product))?;

    Ok(StrictReport {
        strict: correlation_norm <= tol && catalyst_error <= tol,
        correlation_norm,
        catalyst_error,
        system_output,
    })
}

/// Which monotone guards the battery condition.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum BatteryMonotone {
    RelEnt,
    Dmax,
}

fn battery_value(
    kind: BatteryMonotone,
    state: &DensityMatrix,
    family: &FreeSet,
) -> Result<MonotoneResult> {
    match kind {
        BatteryMonotone::RelEnt => rel_ent_resource(state, family),
        BatteryMonotone::Dmax => dmax(state, family),
    }
}

/// Report of a robust battery-assisted transformation check.
#[derive(Debug, Clone)]
pub struct BatteryReport {
    /// Does Λ(ρ⊗τ) factor as σ ⊗ τ'?
    pub battery_valid: bool,
    pub product_error: f64,
    /// R(τ') − R(τ).
    pub monotone_gain: f64,
    /// min over sampled perturbed inputs of R(catalyst out) − R(τ).
    pub worst_robust_slack: f64,
    pub passed: bool,
}

/// Battery robustness: the joint output must be a product σ ⊗ τ', the battery
/// monotone must not decrease, and the same must hold for every sampled input
/// in the ε-ball around ρ.
#[allow(clippy::too_many_arguments)]
pub fn battery_transform_check(
    lambda: &QuantumChannel,
    rho: &DensityMatrix,
    tau: &DensityMatrix,
    f_c: &FreeSet,
    kind: BatteryMonotone,
    epsilon: f64,
    n_samples: usize,
    seed: u64,
    tol: f64,
) -> Result<BatteryReport> {
    use rand::SeedableRng;
    let split = split_system_catalyst(lambda, tau)?;
    let tau_mat = permute_to_label_order(&tau.mat, &tau.fact, split.c_in_fact.labels())?;
    let input = product_on_positions(
        &lambda.in_fact,
        &rho.mat,
        &split.s_in_pos,
        &tau_mat,
        &split.c_in_pos,
    );
    let chi = lambda.apply_mat(&input);

    let c_labels: Vec<&str> = split.c_in_fact.labels().iter().map(|s| s.as_str()).collect();
    let s_labels: Vec<&str> = split.s_out_labels.iter().map(|s| s.as_str()).collect();
    let tau_prime_mat = partial_trace_mat(&chi, &lambda.out_fact, &c_labels)?;
    let out_c_pos = lambda.out_fact.positions_of(&c_labels)?;
    let out_c_fact = lambda.out_fact.select(&out_c_pos);
    let sigma_mat = partial_trace_mat(&chi, &lambda.out_fact, &s_labels)?;
    let out_s_pos = lambda.out_fact.positions_of(&s_labels)?;

    let product = product_on_positions(
        &lambda.out_fact,
        &sigma_mat,
        &out_s_pos,
        &tau_prime_mat,
        &out_c_pos,
    );
    let product_error = trace_norm(&chi.sub(&product))?;
    let battery_valid = product_error <= tol;

    let tau_prime_aligned = permute_to_label_order(&tau_prime_mat, &out_c_fact, tau.fact.labels())?;
    let tau_prime = DensityMatrix::with_tols(tau_prime_aligned, tau.fact.clone(), 1e-7, 1e-7, 1e-7)?;
    let r_tau = battery_value(kind, tau, f_c)?.value_bits;
    let r_tau_prime = battery_value(kind, &tau_prime, f_c)?.value_bits;
    let monotone_gain = r_tau_prime - r_tau;

    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
    let mut worst_robust_slack = f64::INFINITY;
    for _ in 0..n_samples {
        let eta = crate::sampling::random_state_with(&rho.fact, &mut rng);
        let half = epsilon / 2.0;
        let perturbed = rho.mat.scale_re(1.0 - half).add(&eta.mat.scale_re(half));
        let marg = catalyst_marginal(
            lambda,
            &split,
            &perturbed,
            tau,
        )?;
        let out_c = DensityMatrix::with_tols(marg, tau.fact.clone(), 1e-7, 1e-7, 1e-7)?;
        let r_out = battery_value(kind, &out_c, f_c)?.value_bits;
        let slack = r_out - r_tau;
        if slack < worst_robust_slack {
            worst_robust_slack = slack;
        }
    }
    if n_samples == 0 {
        worst_robust_slack = 0.0;
    }

    Ok(BatteryReport {
        battery_valid,
        product_error,
        monotone_gain,
        worst_robust_slack,
        passed: battery_valid && monotone_gain >= -tol && worst_robust_slack >= -tol,
    })
}
