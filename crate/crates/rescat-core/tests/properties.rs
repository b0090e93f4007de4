//! Property tests for the matrix-layer invariants.

use proptest::prelude::*;

use rescat_core::channel::constructors::unitary;
use rescat_core::qmat::{
    eigh, partial_trace, tensor, trace_distance, Complex64, ComplexMatrix, DensityMatrix,
    Factorization,
};

fn state_from_entries(dim: usize, label: &str, entries: &[f64]) -> DensityMatrix {
    let mut g = ComplexMatrix::zeros(dim, dim);
    for i in 0..dim {
        for j in 0..dim {
            let k = 2 * (i * dim + j);
            g.set(i, j, Complex64::new(entries[k], entries[k + 1]));
        }
    }
    let m = g.matmul(&g.adjoint());
    let tr = m.trace().re;
    // a tiny ridge keeps degenerate draws valid
    let d = ComplexMatrix::identity(dim).scale_re(1e-6);
    let m = m.add(&d);
    let tr = tr + 1e-6 * dim as f64;
    DensityMatrix::new(
        m.scale_re(1.0 / tr),
        Factorization::single(dim, label).unwrap(),
    )
    .unwrap()
}

fn unitary_from_entries(dim: usize, entries: &[f64]) -> ComplexMatrix {
    // Gram-Schmidt on a random complex matrix
    let mut cols: Vec<Vec<Complex64>> = Vec::new();
    for j in 0..dim {
        let mut v: Vec<Complex64> = (0..dim)
            .map(|i| {
                let k = 2 * (j * dim + i);
                Complex64::new(entries[k] + if i == j { 2.0 } else { 0.0 }, entries[k + 1])
            })
            .collect();
        for c in &cols {
            let ip: Complex64 = c.iter().zip(v.iter()).map(|(a, b)| a.conj() * b).sum();
            for (vi, ci) in v.iter_mut().zip(c.iter()) {
                *vi -= ip * ci;
            }
        }
        let norm = v.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt();
        for vi in v.iter_mut() {
            *vi = vi.unscale(norm);
        }
        cols.push(v);
    }
    let mut u = ComplexMatrix::zeros(dim, dim);
    for (j, col) in cols.iter().enumerate() {
        for (i, &c) in col.iter().enumerate() {
            u.set(i, j, c);
        }
    }
    u
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn partial_trace_recovers_tensor_factor(
        a_entries in prop::collection::vec(-1.0f64..1.0, 18),
        b_entries in prop::collection::vec(-1.0f64..1.0, 18),
        da in 2usize..=3,
        db in 2usize..=3,
    ) {
        let a = state_from_entries(da, "A", &a_entries);
        let b = state_from_entries(db, "B", &b_entries);
        let joint = tensor(&a, &b).unwrap();
        let back = partial_trace(&joint, &["A"]).unwrap();
        prop_assert!(back.mat.sub(&a.mat).max_abs() < 1e-12);
        let back_b = partial_trace(&joint, &["B"]).unwrap();
        prop_assert!(back_b.mat.sub(&b.mat).max_abs() < 1e-12);
    }

    #[test]
    fn trace_distance_triangle_and_unitary_invariance(
        x_entries in prop::collection::vec(-1.0f64..1.0, 18),
        y_entries in prop::collection::vec(-1.0f64..1.0, 18),
        z_entries in prop::collection::vec(-1.0f64..1.0, 18),
        u_entries in prop::collection::vec(-1.0f64..1.0, 18),
        dim in 2usize..=3,
    ) {
        let x = state_from_entries(dim, "S", &x_entries);
        let y = state_from_entries(dim, "S", &y_entries);
        let z = state_from_entries(dim, "S", &z_entries);
        let dxy = trace_distance(&x, &y).unwrap();
        let dyz = trace_distance(&y, &z).unwrap();
        let dxz = trace_distance(&x, &z).unwrap();
        prop_assert!(dxz <= dxy + dyz + 1e-10, "triangle: {dxz} > {dxy} + {dyz}");
        prop_assert!((-1e-15..=2.0 + 1e-12).contains(&dxy));

        let fact = Factorization::single(dim, "S").unwrap();
        let u = unitary_from_entries(dim, &u_entries);
        let ch = unitary(u, fact.clone(), fact).unwrap();
        let ux = ch.apply(&x).unwrap();
        let uy = ch.apply(&y).unwrap();
        let rotated = trace_distance(&ux, &uy).unwrap();
        prop_assert!((rotated - dxy).abs() < 1e-10, "unitary invariance: {rotated} vs {dxy}");
    }

    #[test]
    fn eigendecomposition_roundtrip_up_to_dim_16(
        entries in prop::collection::vec(-1.0f64..1.0, 512),
        dim in 2usize..=16,
    ) {
        let mut m = ComplexMatrix::zeros(dim, dim);
        for i in 0..dim {
            for j in 0..dim {
                let k = 2 * (i * dim + j);
                m.set(i, j, Complex64::new(entries[k], entries[k + 1]));
            }
        }
        let h = m.hermitian_part();
        let eig = eigh(&h, 1e-9).unwrap();
        let back = eig.reassemble();
        prop_assert!(back.sub(&h).max_abs() < 1e-10);
        for w in eig.values.windows(2) {
            prop_assert!(w[1] >= w[0] - 1e-12);
        }
    }

    #[test]
    fn matrix_json_roundtrips_states(
        entries in prop::collection::vec(-1.0f64..1.0, 18),
        dim in 2usize..=3,
    ) {
        let rho = state_from_entries(dim, "S", &entries);
        let json = rescat_core::qmat::MatrixJson::from_state(&rho);
        let text = serde_json::to_string(&json).unwrap();
        let back: rescat_core::qmat::MatrixJson = serde_json::from_str(&text).unwrap();
        let rho2 = back.to_state().unwrap();
        prop_assert_eq!(rho.mat.data, rho2.mat.data);
    }
}
