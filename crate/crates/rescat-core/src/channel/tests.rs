use super::*;
use crate::testutil::{random_channel, random_state};
use crate::qmat::{
    partial_trace, projector, tensor, trace_distance, DensityMatrix, Factorization,
};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn qfact(label: &str) -> Factorization {
    Factorization::single(2, label).unwrap()
}

fn sc_fact() -> Factorization {
    Factorization::new(vec![2, 2], vec!["S".into(), "C".into()]).unwrap()
}

#[test]
fn cnot_unitary_channel_is_cptp() {
    let ch = cnot(sc_fact()).unwrap();
    let rep = ch.validate_cptp(1e-9).unwrap();
    assert!(rep.cp_ok && rep.tp_ok, "{rep:?}");
}

#[test]
fn trace_decreasing_kraus_fails_tp() {
    let k = projector(&crate::qmat::basis_ket(2, 0));
    let ch = QuantumChannel::new(vec![k], qfact("S"), qfact("S")).unwrap();
    let rep = ch.validate_cptp(1e-9).unwrap();
    assert!(rep.cp_ok);
    assert!(!rep.tp_ok);
}

#[test]
fn identity_channel_preserves_states() {
    let ch = identity(qfact("S")).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let rho = random_state(&qfact("S"), &mut rng);
    let out = ch.apply(&rho).unwrap();
    assert!(out.mat.sub(&rho.mat).max_abs() < 1e-12);
}

#[test]
fn full_depolarizing_maps_to_maximally_mixed() {
    let ch = depolarizing(1.0, qfact("S")).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    let rho = random_state(&qfact("S"), &mut rng);
    let out = ch.apply(&rho).unwrap();
    let mm = DensityMatrix::maximally_mixed(qfact("S"));
    assert!(out.mat.sub(&mm.mat).max_abs() < 1e-12);
}

#[test]
fn cnot_arithmetic_on_computational_basis() {
    // control is the second subsystem: |s, c⟩ ↦ |s ⊕ c, c⟩
    let ch = cnot(sc_fact()).unwrap();
    let u = &ch.kraus[0];
    // |0,1⟩ (flat 1) ↦ |1,1⟩ (flat 3)
    assert!((u.get(3, 1).re - 1.0).abs() < 1e-15);
    // |1,1⟩ ↦ |0,1⟩
    assert!((u.get(1, 3).re - 1.0).abs() < 1e-15);
    // |0,0⟩ and |1,0⟩ fixed
    assert!((u.get(0, 0).re - 1.0).abs() < 1e-15);
    assert!((u.get(2, 2).re - 1.0).abs() < 1e-15);
}

#[test]
fn cnot_entangles_the_imaginary_plus_catalyst() {
    // The plain CNOT maps |0⟩⊗|+̂⟩ to the entangled (|00⟩ + i|11⟩)/√2, so its
    // C marginal is maximally mixed rather than |+̂⟩⟨+̂|.
    let ch = cnot(sc_fact()).unwrap();
    let zero = DensityMatrix::pure(&crate::qmat::basis_ket(2, 0), qfact("S")).unwrap();
    let plus_i = DensityMatrix::pure(&imag_plus_minus_kets()[0], qfact("C")).unwrap();
    let out = ch.apply(&tensor(&zero, &plus_i).unwrap()).unwrap();
    let c_marginal = partial_trace(&out, &["C"]).unwrap();
    let mm = DensityMatrix::maximally_mixed(qfact("C"));
    assert!(c_marginal.mat.sub(&mm.mat).max_abs() < 1e-12);
}

#[test]
fn local_coherence_broadcast_copies_plus() {
    let ch = local_coherence_broadcast("S", "C").unwrap();
    let zero = DensityMatrix::pure(&crate::qmat::basis_ket(2, 0), qfact("S")).unwrap();
    let plus = DensityMatrix::pure(&plus_minus_kets()[0], qfact("C")).unwrap();
    let out = ch.apply(&tensor(&zero, &plus).unwrap()).unwrap();
    let plus_s = DensityMatrix::pure(&plus_minus_kets()[0], qfact("S")).unwrap();
    let expected = tensor(&plus_s, &plus).unwrap();
    assert!(out.mat.sub(&expected.mat).max_abs() < 1e-12);
}

#[test]
fn swap_catalytic_is_a_permutation_cptp() {
    let ch = swap_catalytic().unwrap();
    let rep = ch.validate_cptp(1e-9).unwrap();
    assert!(rep.cp_ok && rep.tp_ok);
    // catalytic balance at p = (0.5, 0.3, 0.2), q = (5/13, 8/13)
    let p = DensityMatrix::from_probs(&[0.5, 0.3, 0.2], "S").unwrap();
    let q = DensityMatrix::from_probs(&[5.0 / 13.0, 8.0 / 13.0], "C").unwrap();
    let out = ch.apply(&tensor(&p, &q).unwrap()).unwrap();
    let c_marginal = partial_trace(&out, &["C"]).unwrap();
    assert!(c_marginal.mat.sub(&q.mat).max_abs() < 1e-12);
}

#[test]
fn induced_channel_of_swap_is_constant() {
    let fact = Factorization::new(vec![2, 2], vec!["S".into(), "C".into()]).unwrap();
    let ch = swap(fact).unwrap();
    let tau = DensityMatrix::from_probs(&[0.7, 0.3], "C").unwrap();
    let induced = induced_channel(&ch, &tau).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    for _ in 0..5 {
        let rho = random_state(&qfact("S"), &mut rng);
        let out = induced.apply(&rho).unwrap();
        assert!(out.mat.sub(&tau.mat).max_abs() < 1e-10);
    }
    assert!(induced.validate_cptp(1e-8).unwrap().cp_ok);
}

#[test]
fn induced_channel_of_identity_is_identity() {
    let fact = Factorization::new(vec![2, 2], vec!["S".into(), "C".into()]).unwrap();
    let ch = identity(fact).unwrap();
    let tau = DensityMatrix::from_probs(&[0.4, 0.6], "C").unwrap();
    let induced = induced_channel(&ch, &tau).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(6);
    let rho = random_state(&qfact("S"), &mut rng);
    let out = induced.apply(&rho).unwrap();
    assert!(out.mat.sub(&rho.mat).max_abs() < 1e-10);
}

#[test]
fn induced_channel_commutes_with_idle_extension() {
    // Reducing Λ ⊗ id_R by τ equals (reduced Λ) ⊗ id_R.
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let sc = Factorization::new(vec![2, 2], vec!["S".into(), "C".into()]).unwrap();
    let lam = random_channel(&sc, &sc, &mut rng);
    let idle = identity(qfact("R")).unwrap();
    let extended = lam.tensor(&idle).unwrap();
    let tau = random_state(&qfact("C"), &mut rng);

    let lhs = induced_channel(&extended, &tau).unwrap();
    let rhs = induced_channel(&lam, &tau).unwrap().tensor(&idle).unwrap();

    let sr = Factorization::new(vec![2, 2], vec!["S".into(), "R".into()]).unwrap();
    for _ in 0..5 {
        let rho = random_state(&sr, &mut rng);
        let a = lhs.apply(&rho).unwrap();
        let b = rhs.apply(&rho).unwrap();
        assert!(a.mat.sub(&b.mat).max_abs() < 1e-9);
    }
}

#[test]
fn composition_matches_sequential_application() {
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    let f = random_channel(&qfact("S"), &qfact("S"), &mut rng);
    let g = random_channel(&qfact("S"), &qfact("S"), &mut rng);
    let fg = f.compose(&g).unwrap();
    for _ in 0..5 {
        let rho = random_state(&qfact("S"), &mut rng);
        let a = fg.apply(&rho).unwrap();
        let b = f.apply(&g.apply(&rho).unwrap()).unwrap();
        assert!(a.mat.sub(&b.mat).max_abs() < 1e-10);
    }
}

#[test]
fn trace_distance_contracts_under_channels() {
    let mut rng = ChaCha8Rng::seed_from_u64(9);
    for _ in 0..20 {
        let ch = random_channel(&qfact("S"), &qfact("S"), &mut rng);
        let rho = random_state(&qfact("S"), &mut rng);
        let sigma = random_state(&qfact("S"), &mut rng);
        let before = trace_distance(&rho, &sigma).unwrap();
        let after =
            trace_distance(&ch.apply(&rho).unwrap(), &ch.apply(&sigma).unwrap()).unwrap();
        assert!(after <= before + 1e-9, "dp violated: {after} > {before}");
    }
}

#[test]
fn constructors_produce_validated_channels() {
    let channels: Vec<QuantumChannel> = vec![
        cnot(sc_fact()).unwrap(),
        swap_catalytic().unwrap(),
        local_coherence_broadcast("S", "C").unwrap(),
        depolarizing(0.3, qfact("S")).unwrap(),
        zero_t_athermality(
            &DensityMatrix::from_probs(&[0.25, 0.75], "S").unwrap(),
            2,
            "C",
        )
        .unwrap(),
    ];
    for ch in channels {
        let rep = ch.validate_cptp(1e-9).unwrap();
        assert!(rep.cp_ok && rep.tp_ok, "{rep:?}");
    }
}

#[test]
fn measure_prepare_threshold_broadcaster_validates() {
    // γ_C = diag(0.7, 0.3), σ = |1⟩⟨1|, singleton free set {diag(0.6, 0.4)}
    let psi = projector(&crate::qmat::basis_ket(2, 1));
    let not_psi = ComplexMatrix::identity(2).sub(&psi);
    let sigma = DensityMatrix::pure(&crate::qmat::basis_ket(2, 1), qfact("S")).unwrap();
    let psi_state = DensityMatrix::new(psi.clone(), qfact("C")).unwrap();
    let zeta = DensityMatrix::pure(&crate::qmat::basis_ket(2, 0), qfact("C")).unwrap();
    let omega = DensityMatrix::from_probs(&[6.0 / 7.0, 1.0 / 7.0], "S").unwrap();

    let prep1 = tensor(&sigma, &psi_state).unwrap();
    let prep2 = tensor(&omega, &zeta).unwrap();
    let b = measure_prepare(vec![psi, not_psi], vec![prep1, prep2], qfact("C")).unwrap();
    let rep = b.validate_cptp(1e-9).unwrap();
    assert!(rep.cp_ok && rep.tp_ok);

    // broadcasts ψ: B(ψ) = σ ⊗ ψ
    let out = b.apply(&psi_state).unwrap();
    let expected = tensor(&sigma, &psi_state).unwrap();
    assert!(out.mat.sub(&expected.mat).max_abs() < 1e-12);
}

#[test]
fn trace_and_prepare_induces_constant_channel() {
    // Λ = B ∘ Tr_S with B the threshold broadcaster above; the induced
    // channel at τ = ψ is constant with value σ.
    let psi = projector(&crate::qmat::basis_ket(2, 1));
    let not_psi = ComplexMatrix::identity(2).sub(&psi);
    let sigma = DensityMatrix::pure(&crate::qmat::basis_ket(2, 1), qfact("So")).unwrap();
    let psi_state = DensityMatrix::new(psi.clone(), qfact("C")).unwrap();
    let zeta = DensityMatrix::pure(&crate::qmat::basis_ket(2, 0), qfact("C")).unwrap();
    let omega = DensityMatrix::from_probs(&[6.0 / 7.0, 1.0 / 7.0], "So").unwrap();
    let b = measure_prepare(
        vec![psi, not_psi],
        vec![
            tensor(&sigma, &psi_state).unwrap(),
            tensor(&omega, &zeta).unwrap(),
        ],
        qfact("C"),
    )
    .unwrap();

    let lam = trace_and_prepare(&b, qfact("S")).unwrap();
    let induced = induced_channel(&lam, &psi_state).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(10);
    let rho = random_state(&qfact("S"), &mut rng);
    let out = induced.apply(&rho).unwrap();
    assert!(out.mat.sub(&sigma.mat).max_abs() < 1e-10);
}

#[test]
fn channel_json_roundtrip() {
    let ch = swap_catalytic().unwrap();
    let text = serde_json::to_string(&ChannelJson::from_channel("swap_catalytic", &ch)).unwrap();
    let back: ChannelJson = serde_json::from_str(&text).unwrap();
    let ch2 = back.to_channel().unwrap();
    assert_eq!(ch.kraus.len(), ch2.kraus.len());
    for (a, b) in ch.kraus.iter().zip(ch2.kraus.iter()) {
        assert_eq!(a.data, b.data);
    }
}

#[test]
fn non_unitary_rejected() {
    let m = ComplexMatrix::from_real(2, 2, &[1.0, 0.0, 0.0, 2.0]).unwrap();
    assert!(unitary(m, qfact("S"), qfact("S")).is_err());
}

#[test]
fn invalid_povm_rejected() {
    let e1 = projector(&crate::qmat::basis_ket(2, 0));
    // missing the complement: sums to a projector, not identity
    let prep = DensityMatrix::from_probs(&[1.0, 0.0], "S").unwrap();
    assert!(measure_prepare(vec![e1], vec![prep], qfact("C")).is_err());
}
