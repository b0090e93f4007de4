use super::*;
use crate::freeset::{compose, membership, CompositionRule, FreeSet};
use crate::qmat::{basis_ket, tensor, Complex64, Factorization};
use crate::testutil::random_state;
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn qfact(label: &str) -> Factorization {
    Factorization::single(2, label).unwrap()
}

fn plus_state(label: &str) -> DensityMatrix {
    DensityMatrix::pure(
        &[Complex64::new(1.0, 0.0), Complex64::new(1.0, 0.0)],
        qfact(label),
    )
    .unwrap()
}

/// Brute-force grid oracle for inf_σ S(ρ‖σ) over diagonal qubit states.
fn grid_oracle_rel_ent_incoherent(rho: &DensityMatrix) -> f64 {
    let mut best = f64::INFINITY;
    let mut p = 0.0001f64;
    while p < 1.0 {
        let sigma = ComplexMatrix::from_diag(&[p, 1.0 - p]);
        let v = rel_entropy_bits(&rho.mat, &sigma).unwrap();
        if v < best {
            best = v;
        }
        p += 0.0025;
    }
    best
}

#[test]
fn dmax_closed_form_example() {
    let zero = DensityMatrix::pure(&basis_ket(2, 0), qfact("S")).unwrap();
    let gamma = DensityMatrix::from_probs(&[0.7, 0.3], "S").unwrap();
    let result = dmax(&zero, &FreeSet::Singleton(gamma)).unwrap();
    let expected = (1.0f64 / 0.7).log2();
    assert!(
        (result.value_bits - expected).abs() < 1e-12,
        "got {} want {}",
        result.value_bits,
        expected
    );
}

#[test]
fn dmax_of_free_state_is_zero() {
    let gamma = DensityMatrix::from_probs(&[0.7, 0.3], "S").unwrap();
    let result = dmax(&gamma, &FreeSet::Singleton(gamma.clone())).unwrap();
    assert!(result.value_bits.abs() < 1e-12);
}

#[test]
fn dmax_pure_state_maximum_attained_at_orthogonal_level() {
    // sup over pure τ of D_max(τ‖γ) = log₂(1/λ_min(γ)), attained at |1⟩
    let gamma = DensityMatrix::from_probs(&[0.7, 0.3], "S").unwrap();
    let family = FreeSet::Singleton(gamma);
    let one = DensityMatrix::pure(&basis_ket(2, 1), qfact("S")).unwrap();
    let at_one = dmax(&one, &family).unwrap().value_bits;
    assert!((at_one - (1.0f64 / 0.3).log2()).abs() < 1e-12);

    let mut rng = ChaCha8Rng::seed_from_u64(13);
    for _ in 0..50 {
        let v = [
            Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)),
            Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)),
        ];
        let tau = DensityMatrix::pure(&v, qfact("S")).unwrap();
        let val = dmax(&tau, &family).unwrap().value_bits;
        assert!(val <= at_one + 1e-10);
    }
}

#[test]
fn dmax_bisection_agrees_with_closed_form_on_random_singletons() {
    let mut rng = ChaCha8Rng::seed_from_u64(14);
    for _ in 0..100 {
        let rho = random_state(&qfact("S"), &mut rng);
        let gamma = random_state(&qfact("S"), &mut rng);
        let family = FreeSet::Singleton(gamma);
        let closed = dmax(&rho, &family).unwrap().value_bits;
        let bisected = dmax_bisection(&rho, &family).unwrap().value_bits;
        assert!(
            (closed - bisected).abs() < 1e-7,
            "closed {closed} vs bisection {bisected}"
        );
    }
}

#[test]
fn dmax_incoherent_qubit_matches_analytic_value() {
    // For qubits, D_max(ρ‖incoherent) = log₂(1 + 2|ρ01|): the minimal
    // diagonal majorant of ρ has trace 1 + 2|ρ01|.
    let mut rng = ChaCha8Rng::seed_from_u64(15);
    let inc = FreeSet::incoherent(2);
    for _ in 0..25 {
        let rho = random_state(&qfact("S"), &mut rng);
        let expected = (1.0 + 2.0 * rho.mat.get(0, 1).norm()).log2();
        let got = dmax(&rho, &inc).unwrap();
        assert!(
            (got.value_bits - expected).abs() < 2e-8,
            "got {} want {expected}",
            got.value_bits
        );
        // certificate is a valid free state with ρ ≤ rω
        if let Some(Certificate::Feasible { omega, r }) = got.certificate {
            let m = omega.scale_re(r).sub(&rho.mat);
            assert!(eigh(&m, 1e-7).unwrap().min_value() > -1e-7);
            let omega_state = DensityMatrix::new(omega, qfact("S")).unwrap();
            assert!(membership(&omega_state, &inc, 1e-6).unwrap().is_member());
        } else {
            panic!("expected feasibility certificate");
        }
    }
}

#[test]
fn dmax_ground_state_support_violation_is_infinite() {
    let excited = DensityMatrix::from_probs(&[0.5, 0.5], "S").unwrap();
    let result = dmax(&excited, &FreeSet::ground_state(2)).unwrap();
    assert!(result.is_infinite());
}

#[test]
fn dmax_rank_deficient_singleton_outside_support() {
    let gamma = DensityMatrix::pure(&basis_ket(2, 0), qfact("S")).unwrap();
    let rho = DensityMatrix::from_probs(&[0.5, 0.5], "S").unwrap();
    let result = dmax(&rho, &FreeSet::Singleton(gamma)).unwrap();
    assert!(result.is_infinite());
}

#[test]
fn dmax_max_composite_of_singletons_product_case() {
    // For ρ = ρ_A ⊗ γ_B and Max(γ_A, γ_B) the value is exactly
    // D_max(ρ_A‖γ_A): the B marginal is already pinned.
    let gamma_a = DensityMatrix::from_probs(&[0.6, 0.4], "A").unwrap();
    let gamma_b = DensityMatrix::from_probs(&[0.5, 0.5], "B").unwrap();
    let rho_a = DensityMatrix::pure(&basis_ket(2, 0), qfact("A")).unwrap();
    let rho = tensor(&rho_a, &gamma_b).unwrap();
    let family = compose(
        vec![FreeSet::Singleton(gamma_a.clone()), FreeSet::Singleton(gamma_b)],
        CompositionRule::Max,
    )
    .unwrap();
    let got = dmax(&rho, &family).unwrap();
    let expected = dmax(&rho_a, &FreeSet::Singleton(gamma_a)).unwrap().value_bits;
    assert!(
        (got.value_bits - expected).abs() < 1e-4,
        "got {} want {expected}",
        got.value_bits
    );
}

#[test]
fn rel_ent_of_plus_state_is_one_bit() {
    let result = rel_ent_resource(&plus_state("S"), &FreeSet::incoherent(2)).unwrap();
    assert!(
        (result.value_bits - 1.0).abs() < 1e-6,
        "got {}",
        result.value_bits
    );
    // grid brute-force cross-check
    let oracle = grid_oracle_rel_ent_incoherent(&plus_state("S"));
    assert!((result.value_bits - oracle).abs() < 1e-4);
}

#[test]
fn rel_ent_of_free_state_is_zero() {
    let rho = DensityMatrix::from_probs(&[0.3, 0.7], "S").unwrap();
    let result = rel_ent_resource(&rho, &FreeSet::incoherent(2)).unwrap();
    assert!(result.value_bits.abs() < 1e-9);
}

#[test]
fn rel_ent_mirror_descent_matches_grid_oracle_on_random_states() {
    let mut rng = ChaCha8Rng::seed_from_u64(16);
    let inc = FreeSet::incoherent(2);
    for _ in 0..10 {
        let rho = random_state(&qfact("S"), &mut rng);
        let got = rel_ent_resource(&rho, &inc).unwrap();
        let oracle = grid_oracle_rel_ent_incoherent(&rho);
        assert!(
            (got.value_bits - oracle).abs() < 5e-5,
            "got {} oracle {oracle}",
            got.value_bits
        );
        // the optimizer certificate must be free
        if let Some(Certificate::ClosestFreeState(sigma)) = got.certificate {
            let sigma_state = DensityMatrix::new(sigma, qfact("S")).unwrap();
            assert!(membership(&sigma_state, &inc, 1e-6).unwrap().is_member());
        }
    }
}

#[test]
fn rel_ent_appending_free_state_preserves_value() {
    // R(ρ ⊗ γ_C, Min(F_S, {γ_C})) = R(ρ, F_S)
    let mut rng = ChaCha8Rng::seed_from_u64(17);
    let gamma_c = DensityMatrix::from_probs(&[0.7, 0.3], "C").unwrap();
    for _ in 0..5 {
        let rho = random_state(&qfact("S"), &mut rng);
        let joint = tensor(&rho, &gamma_c).unwrap();
        let family = compose(
            vec![FreeSet::incoherent(2), FreeSet::Singleton(gamma_c.clone())],
            CompositionRule::Min,
        )
        .unwrap();
        let joint_val = rel_ent_resource(&joint, &family).unwrap().value_bits;
        let base_val = rel_ent_resource(&rho, &FreeSet::incoherent(2)).unwrap().value_bits;
        assert!(
            (joint_val - base_val).abs() < 1e-4,
            "joint {joint_val} vs base {base_val}"
        );
    }
}

#[test]
fn rev_rel_ent_free_state_is_zero() {
    let rho = DensityMatrix::from_probs(&[0.5, 0.5], "S").unwrap();
    let result = rev_rel_ent_resource(&rho, &FreeSet::incoherent(2)).unwrap();
    assert!(result.value_bits.abs() < 1e-9);
}

#[test]
fn rev_rel_ent_of_pure_coherent_state_is_infinite() {
    // no diagonal state is supported inside span{|+⟩}
    let result = rev_rel_ent_resource(&plus_state("S"), &FreeSet::incoherent(2)).unwrap();
    assert!(result.is_infinite());
}

#[test]
fn rev_rel_ent_additive_on_products() {
    let mut rng = ChaCha8Rng::seed_from_u64(18);
    for _ in 0..10 {
        let rho_a = random_state(&qfact("A"), &mut rng);
        let rho_b = random_state(&qfact("B"), &mut rng);
        let product = tensor(&rho_a, &rho_b).unwrap();
        let family = compose(
            vec![FreeSet::incoherent(2), FreeSet::incoherent(2)],
            CompositionRule::Min,
        )
        .unwrap();
        let joint = rev_rel_ent_resource(&product, &family).unwrap().value_bits;
        let a = rev_rel_ent_resource(&rho_a, &FreeSet::incoherent(2)).unwrap().value_bits;
        let b = rev_rel_ent_resource(&rho_b, &FreeSet::incoherent(2)).unwrap().value_bits;
        assert!(
            (joint - a - b).abs() < 1e-4,
            "joint {joint} vs parts {a} + {b}"
        );
    }
}

#[test]
fn measured_lb_classical_case_equals_relative_entropy() {
    // commuting diagonal ρ and σ with the computational measurement
    let rho = DensityMatrix::from_probs(&[0.8, 0.2], "S").unwrap();
    let sigma = DensityMatrix::from_probs(&[0.6, 0.4], "S").unwrap();
    let family = FreeSet::Singleton(sigma.clone());
    let m0 = MeasurementSet::computational(2);
    let got = measured_rel_ent_resource_lb(&rho, &family, &m0).unwrap();
    let expected = rel_entropy_bits(&rho.mat, &sigma.mat).unwrap();
    assert!(
        (got.value_bits - expected).abs() < 1e-9,
        "got {} want {expected}",
        got.value_bits
    );
}

#[test]
fn measured_lb_of_free_state_is_zero() {
    let rho = DensityMatrix::from_probs(&[0.3, 0.7], "S").unwrap();
    let m0 = MeasurementSet::informationally_complete_qubit();
    let got = measured_rel_ent_resource_lb(&rho, &FreeSet::incoherent(2), &m0).unwrap();
    assert!(got.value_bits.abs() < 1e-7, "got {}", got.value_bits);
}

#[test]
fn measured_lb_never_exceeds_rel_ent() {
    let mut rng = ChaCha8Rng::seed_from_u64(19);
    let m0 = MeasurementSet::informationally_complete_qubit();
    let inc = FreeSet::incoherent(2);
    for _ in 0..200 {
        let rho = random_state(&qfact("S"), &mut rng);
        let lb = measured_rel_ent_resource_lb(&rho, &inc, &m0).unwrap().value_bits;
        let full = rel_ent_resource(&rho, &inc).unwrap().value_bits;
        assert!(lb <= full + 1e-6, "lb {lb} exceeds R {full}");
    }
}

#[test]
fn dmax_faithful_iff_member_singleton() {
    let mut rng = ChaCha8Rng::seed_from_u64(20);
    let gamma = DensityMatrix::from_probs(&[0.6, 0.4], "S").unwrap();
    let family = FreeSet::Singleton(gamma.clone());
    // the free state itself: zero
    assert!(dmax(&gamma, &family).unwrap().value_bits.abs() < 1e-9);
    // random states: strictly positive and non-member
    for _ in 0..50 {
        let rho = random_state(&qfact("S"), &mut rng);
        let v = dmax(&rho, &family).unwrap().value_bits;
        let member = membership(&rho, &family, 1e-6).unwrap().is_member();
        assert_eq!(v.abs() < 1e-6, member, "value {v}, member {member}");
    }
}

#[test]
fn empty_measurement_set_is_rejected() {
    assert!(MeasurementSet::new(vec![]).is_err());
}

#[test]
fn unsupported_family_errors() {
    let rho = DensityMatrix::maximally_mixed(
        Factorization::new(vec![2, 2], vec!["A".into(), "B".into()]).unwrap(),
    );
    let sep = FreeSet::SeparableDesk { dims: (2, 2) };
    assert!(matches!(
        dmax(&rho, &sep),
        Err(crate::error::Error::Unsupported(_))
    ));
}

#[test]
fn monotone_result_json_shape() {
    let gamma = DensityMatrix::from_probs(&[0.7, 0.3], "S").unwrap();
    let zero = DensityMatrix::pure(&basis_ket(2, 0), qfact("S")).unwrap();
    let result = dmax(&zero, &FreeSet::Singleton(gamma)).unwrap();
    let v = result.to_json();
    assert_eq!(v["infinite"], serde_json::json!(false));
    assert!(v["value_bits"].is_f64());

    let inf = rev_rel_ent_resource(&plus_state("S"), &FreeSet::incoherent(2)).unwrap();
    let vi = inf.to_json();
    assert_eq!(vi["infinite"], serde_json::json!(true));
    assert!(vi.get("value_bits").is_none());
}
