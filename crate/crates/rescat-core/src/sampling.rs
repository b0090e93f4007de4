//! Seeded generators for states and the structured channel families used by
//! the falsification and property suites.
//!
//! All generators are deterministic functions of their seed. The channel
//! families are free by construction for their stated theory: measure-prepare
//! maps with incoherent POVMs and free preparations, permutations of the
//! incoherent basis, and mixtures of these, so the sweeps never mislabel a
//! channel.

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::channel::constructors::{
    identity, measure_prepare, permutation_unitary, replace_with,
};
use crate::channel::QuantumChannel;
use crate::qmat::{outer, Complex64, ComplexMatrix, DensityMatrix, Factorization};

pub(crate) fn random_state_with(fact: &Factorization, rng: &mut ChaCha8Rng) -> DensityMatrix {
    let d = fact.total_dim();
    let mut g = ComplexMatrix::zeros(d, d);
    for i in 0..d {
        for j in 0..d {
            g.set(
                i,
                j,
                Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)),
            );
        }
    }
    let m = g.matmul(&g.adjoint());
    let tr = m.trace().re;
    DensityMatrix::new(m.scale_re(1.0 / tr), fact.clone()).expect("Ginibre state is valid")
}

/// Seeded random full-rank state.
pub fn random_state(fact: &Factorization, seed: u64) -> DensityMatrix {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    random_state_with(fact, &mut rng)
}

/// Seeded random probability vector.
pub fn random_probs(n: usize, rng: &mut ChaCha8Rng) -> Vec<f64> {
    let mut p: Vec<f64> = (0..n).map(|_| rng.gen_range(0.02..1.0)).collect();
    let total: f64 = p.iter().sum();
    for x in p.iter_mut() {
        *x /= total;
    }
    p
}

fn random_permutation(n: usize, rng: &mut ChaCha8Rng) -> Vec<usize> {
    let mut perm: Vec<usize> = (0..n).collect();
    for i in (1..n).rev() {
        let j = rng.gen_range(0..=i);
        perm.swap(i, j);
    }
    perm
}

/// Random diagonal POVM: effects diagonal in the computational basis that sum
/// to the identity.
fn random_diagonal_povm(dim: usize, outcomes: usize, rng: &mut ChaCha8Rng) -> Vec<ComplexMatrix> {
    // each diagonal slot splits its unit weight over the outcomes
    let mut effects = vec![vec![0.0f64; dim]; outcomes];
    for d in 0..dim {
        let split = random_probs(outcomes, rng);
        for (o, w) in split.iter().enumerate() {
            effects[o][d] = *w;
        }
    }
    effects.iter().map(|e| ComplexMatrix::from_diag(e)).collect()
}

fn random_diagonal_state(fact: &Factorization, rng: &mut ChaCha8Rng) -> DensityMatrix {
    let probs = random_probs(fact.total_dim(), rng);
    DensityMatrix::new(ComplexMatrix::from_diag(&probs), fact.clone())
        .expect("diagonal state is valid")
}

/// Random channel C → S'C that is resource non-generating for the
/// Min-composed incoherent theory: measure C with an incoherent POVM and
/// prepare free (diagonal) states on S'C, optionally after a permutation of
/// the incoherent basis of C.
pub fn random_incoherent_broadcast_channel(
    c_fact: &Factorization,
    out_fact: &Factorization,
    seed: u64,
) -> QuantumChannel {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let d_c = c_fact.total_dim();
    let outcomes = rng.gen_range(2..=4);
    let povm = random_diagonal_povm(d_c, outcomes, &mut rng);
    let preps: Vec<DensityMatrix> = (0..outcomes)
        .map(|_| random_diagonal_state(out_fact, &mut rng))
        .collect();
    let mp = measure_prepare(povm, preps, c_fact.clone()).expect("diagonal POVM is valid");
    if rng.gen_bool(0.5) {
        let perm = random_permutation(d_c, &mut rng);
        let pu = permutation_unitary(&perm, c_fact.clone()).expect("permutation");
        mp.compose(&pu).expect("compatible composition")
    } else {
        mp
    }
}

/// Random incoherent channel on a single space (permutations of the basis,
/// diagonal measure-prepare maps, and mixtures).
pub fn random_incoherent_channel(fact: &Factorization, seed: u64) -> QuantumChannel {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let d = fact.total_dim();
    let perm = random_permutation(d, &mut rng);
    let pu = permutation_unitary(&perm, fact.clone()).expect("permutation");
    let outcomes = rng.gen_range(2..=3);
    let povm = random_diagonal_povm(d, outcomes, &mut rng);
    let preps: Vec<DensityMatrix> = (0..outcomes)
        .map(|_| random_diagonal_state(fact, &mut rng))
        .collect();
    let mp = measure_prepare(povm, preps, fact.clone()).expect("diagonal POVM");
    let w = rng.gen_range(0.0..1.0);
    QuantumChannel::mixture(&[(w, pu), (1.0 - w, mp)]).expect("mixture")
}

/// Random channel preserving the single free state γ: mixtures of the
/// identity, the γ-replacer, and unitaries diagonal in the eigenbasis of γ.
pub fn random_singleton_rng_channel(gamma: &DensityMatrix, seed: u64) -> QuantumChannel {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let fact = gamma.fact.clone();
    let d = gamma.dim();
    let id = identity(fact.clone()).expect("identity");
    let replace = replace_with(gamma, fact.clone()).expect("replace");
    // phase unitary commuting with γ
    let eig = gamma.eig().expect("state eigendecomposition");
    let mut u = ComplexMatrix::zeros(d, d);
    for k in 0..d {
        let theta: f64 = rng.gen_range(0.0..std::f64::consts::TAU);
        let phase = Complex64::new(theta.cos(), theta.sin());
        let col = eig.vectors.column(k);
        let p = outer(&col, &col).scale(phase);
        u = u.add(&p);
    }
    let pu = QuantumChannel::new(vec![u], fact.clone(), fact).expect("phase unitary");
    let w1 = rng.gen_range(0.0..1.0);
    let w2 = rng.gen_range(0.0..(1.0 - w1));
    let w3 = 1.0 - w1 - w2;
    QuantumChannel::mixture(&[(w1, id), (w2, replace), (w3, pu)]).expect("mixture")
}

/// Random genuinely catalytic dilation on S ⊗ C together with its catalyst:
/// Λ = B ∘ Tr_S with Tr_{S'}[B(τ)] = τ by construction.
pub fn random_catalytic_instance(
    s_dim: usize,
    c_dim: usize,
    seed: u64,
) -> (QuantumChannel, DensityMatrix) {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let s_fact = Factorization::single(s_dim, "S").expect("fact");
    let c_fact = Factorization::single(c_dim, "C").expect("fact");
    let tau = random_state_with(&c_fact, &mut rng);

    let b = match rng.gen_range(0..3u8) {
        0 => {
            // prepare a fixed state on S', keep C untouched
            let xi = random_state_with(&s_fact, &mut rng);
            crate::channel::constructors::prepend_state(&xi, c_fact.clone()).expect("prepend")
        }
        1 => {
            // mixture of (prepare ξ_k ⊗ apply a τ-commuting phase unitary)
            let eig = tau.eig().expect("eig");
            let mut channels = Vec::new();
            let parts = 2;
            let mut weights = random_probs(parts, &mut rng);
            for _ in 0..parts {
                let xi = random_state_with(&s_fact, &mut rng);
                let prep = crate::channel::constructors::prepend_state(&xi, c_fact.clone())
                    .expect("prepend");
                let mut u = ComplexMatrix::zeros(c_dim, c_dim);
                for k in 0..c_dim {
                    let theta: f64 = rng.gen_range(0.0..std::f64::consts::TAU);
                    let phase = Complex64::new(theta.cos(), theta.sin());
                    let col = eig.vectors.column(k);
                    u = u.add(&outer(&col, &col).scale(phase));
                }
                let pu = QuantumChannel::new(vec![u], c_fact.clone(), c_fact.clone())
                    .expect("phase unitary");
                channels.push(prep.compose(&pu).expect("compose"));
            }
            let weighted: Vec<(f64, QuantumChannel)> = weights
                .drain(..)
                .zip(channels)
                .collect();
            QuantumChannel::mixture(&weighted).expect("mixture")
        }
        _ => {
            // measure C in the eigenbasis of τ, prepare ξ_i ⊗ (eigenstate i):
            // correlates S' with C but keeps the τ marginal fixed
            let eig = tau.eig().expect("eig");
            let mut povm = Vec::new();
            let mut preps = Vec::new();
            for k in 0..c_dim {
                let col = eig.vectors.column(k);
                povm.push(outer(&col, &col));
                let xi = random_state_with(&s_fact, &mut rng);
                let c_state = DensityMatrix::with_tols(
                    outer(&col, &col),
                    c_fact.clone(),
                    1e-7,
                    1e-7,
                    1e-7,
                )
                .expect("eigenprojector state");
                preps.push(crate::qmat::tensor(&xi, &c_state).expect("product"));
            }
            measure_prepare(povm, preps, c_fact.clone()).expect("eigenbasis POVM")
        }
    };
    let lambda = crate::channel::constructors::trace_and_prepare(&b, s_fact).expect("dilation");
    (lambda, tau)
}

/// Random fine-tuned (non-robust) catalysis instance: a catalytic-swap
/// dilation mixed with the identity, catalytic exactly at diag(p).
pub fn random_finetuned_instance(seed: u64) -> (QuantumChannel, DensityMatrix, DensityMatrix) {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let p = random_probs(3, &mut rng);
    let q1 = (p[1] + p[2]) / (1.0 + p[1]);
    let q = vec![q1, 1.0 - q1];
    let swap = crate::channel::constructors::swap_catalytic().expect("swap");
    let sc = swap.in_fact.clone();
    let w = rng.gen_range(0.3..1.0);
    let lambda = QuantumChannel::mixture(&[(w, swap), (1.0 - w, identity(sc).expect("id"))])
        .expect("mixture");
    let rho = DensityMatrix::from_probs(&p, "S").expect("state");
    let tau = DensityMatrix::from_probs(&q, "C").expect("state");
    (lambda, tau, rho)
}

/// Random free channel on S ⊗ C for the Min-composed incoherent theory.
/// Mixes basis permutations, diagonal measure-prepare maps and, with some
/// probability, a strict template that prepares a free state on S while
/// fixing the catalyst marginal.
pub fn random_free_incoherent_dilation(
    s_dim: usize,
    c_dim: usize,
    seed: u64,
) -> QuantumChannel {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let fact = Factorization::new(vec![s_dim, c_dim], vec!["S".into(), "C".into()])
        .expect("fact");
    match rng.gen_range(0..3u8) {
        0 => {
            let d = s_dim * c_dim;
            let perm = random_permutation(d, &mut rng);
            permutation_unitary(&perm, fact).expect("permutation")
        }
        1 => {
            let d = s_dim * c_dim;
            let outcomes = rng.gen_range(2..=3);
            let povm = random_diagonal_povm(d, outcomes, &mut rng);
            let preps: Vec<DensityMatrix> = (0..outcomes)
                .map(|_| random_diagonal_state(&fact, &mut rng))
                .collect();
            measure_prepare(povm, preps, fact).expect("diagonal POVM")
        }
        _ => {
            // strict template: discard S, prepare a free σ_S, keep C as is
            let s_fact = Factorization::single(s_dim, "S").expect("fact");
            let c_fact = Factorization::single(c_dim, "C").expect("fact");
            let sigma = random_diagonal_state(&s_fact, &mut rng);
            let b = crate::channel::constructors::prepend_state(&sigma, c_fact)
                .expect("prepend");
            crate::channel::constructors::trace_and_prepare(&b, s_fact).expect("dilation")
        }
    }
}
