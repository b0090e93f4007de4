//! Hermitian eigendecomposition by cyclic complex Jacobi rotations.
//!
//! Contract: eigenvalues in ascending order, orthonormal eigenvectors in the
//! matching column order, and deterministic output for identical input. The
//! gauge of each eigenvector is fixed by making its largest-magnitude
//! component real and positive (ties broken by lowest index), so repeated
//! calls and degenerate spectra produce reproducible bases.

use super::matrix::{Complex64, ComplexMatrix};
use crate::error::{Error, Result};

/// Result of a Hermitian eigendecomposition.
#[derive(Debug, Clone)]
pub struct HermitianEig {
    /// Eigenvalues in ascending order.
    pub values: Vec<f64>,
    /// Orthonormal eigenvectors; column k belongs to `values[k]`.
    pub vectors: ComplexMatrix,
}

impl HermitianEig {
    pub fn min_value(&self) -> f64 {
        self.values[0]
    }

    pub fn max_value(&self) -> f64 {
        *self.values.last().expect("nonempty spectrum")
    }

    /// Reassemble Σ f(λ_k) |v_k⟩⟨v_k|.
    pub fn apply_fn(&self, f: impl Fn(f64) -> f64) -> ComplexMatrix {
        let n = self.values.len();
        let mut out = ComplexMatrix::zeros(n, n);
        for k in 0..n {
            let fv = f(self.values[k]);
            if fv == 0.0 {
                continue;
            }
            let col = self.vectors.column(k);
            for i in 0..n {
                for j in 0..n {
                    let v = out.get(i, j) + col[i] * col[j].conj() * fv;
                    out.set(i, j, v);
                }
            }
        }
        out
    }

    /// Reassemble the original matrix.
    pub fn reassemble(&self) -> ComplexMatrix {
        self.apply_fn(|x| x)
    }
}

/// Eigendecompose a Hermitian matrix.
///
/// The input is validated against `herm_tol` and then symmetrized, so entries
/// carrying numerical dust of size below the tolerance do not perturb the
/// result. Fails with `Error::NotHermitian` otherwise.
pub fn eigh(m: &ComplexMatrix, herm_tol: f64) -> Result<HermitianEig> {
    if !m.is_square() {
        return Err(Error::DimensionMismatch {
            expected: m.rows,
            got: m.cols,
        });
    }
    let dev = m.herm_deviation();
    if dev > herm_tol {
        return Err(Error::NotHermitian {
            deviation: dev,
            tol: herm_tol,
        });
    }
    let n = m.rows;
    if n == 0 {
        return Ok(HermitianEig {
            values: vec![],
            vectors: ComplexMatrix::zeros(0, 0),
        });
    }

    let mut a = m.hermitian_part();
    let mut v = ComplexMatrix::identity(n);
    let scale = a.max_abs().max(1.0);
    let stop = 1e-15 * scale;

    for _sweep in 0..64 {
        let mut max_off: f64 = 0.0;
        for p in 0..n {
            for q in (p + 1)..n {
                let apq = a.get(p, q);
                let mag = apq.norm();
                max_off = max_off.max(mag);
                if mag <= stop {
                    continue;
                }
                rotate(&mut a, &mut v, p, q, apq, mag);
            }
        }
        if max_off <= stop {
            break;
        }
    }

    // Sort ascending; stable so degenerate eigenvalues keep index order.
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| {
        a.get(i, i)
            .re
            .partial_cmp(&a.get(j, j).re)
            .expect("finite eigenvalues")
    });

    let values: Vec<f64> = order.iter().map(|&i| a.get(i, i).re).collect();
    let mut vectors = ComplexMatrix::zeros(n, n);
    for (new_col, &old_col) in order.iter().enumerate() {
        let mut col = v.column(old_col);
        fix_gauge(&mut col);
        for i in 0..n {
            vectors.set(i, new_col, col[i]);
        }
    }

    Ok(HermitianEig { values, vectors })
}

/// One Jacobi rotation zeroing the (p, q) entry.
fn rotate(a: &mut ComplexMatrix, v: &mut ComplexMatrix, p: usize, q: usize, apq: Complex64, mag: f64) {
    let n = a.rows;
    // Absorb the phase so the 2x2 block becomes real symmetric.
    let phase = apq.unscale(mag); // e^{iφ}
    let app = a.get(p, p).re;
    let aqq = a.get(q, q).re;

    let tau = (aqq - app) / (2.0 * mag);
    let t = if tau >= 0.0 {
        1.0 / (tau + (1.0 + tau * tau).sqrt())
    } else {
        -1.0 / (-tau + (1.0 + tau * tau).sqrt())
    };
    let c = 1.0 / (1.0 + t * t).sqrt();
    let s = t * c;

    // Combined unitary on columns (p, q):
    //   R[p][p] = c, R[p][q] = s, R[q][p] = -s e^{-iφ}, R[q][q] = c e^{-iφ}.
    let e_m = phase.conj(); // e^{-iφ}
    let e_p = phase; // e^{+iφ}

    // A <- R† A R  (columns first, then rows).
    for k in 0..n {
        let akp = a.get(k, p);
        let akq = a.get(k, q);
        a.set(k, p, akp.scale(c) - akq * e_m.scale(s));
        a.set(k, q, akp.scale(s) + akq * e_m.scale(c));
    }
    for k in 0..n {
        let apk = a.get(p, k);
        let aqk = a.get(q, k);
        a.set(p, k, apk.scale(c) - aqk * e_p.scale(s));
        a.set(q, k, apk.scale(s) + aqk * e_p.scale(c));
    }
    // Clean the rotated pair so roundoff does not linger off-diagonal.
    a.set(p, q, Complex64::new(0.0, 0.0));
    a.set(q, p, Complex64::new(0.0, 0.0));
    let hpp = a.get(p, p);
    let hqq = a.get(q, q);
    a.set(p, p, Complex64::new(hpp.re, 0.0));
    a.set(q, q, Complex64::new(hqq.re, 0.0));

    for k in 0..n {
        let vkp = v.get(k, p);
        let vkq = v.get(k, q);
        v.set(k, p, vkp.scale(c) - vkq * e_m.scale(s));
        v.set(k, q, vkp.scale(s) + vkq * e_m.scale(c));
    }
}

/// Make the largest-magnitude component real positive (lowest index on ties).
fn fix_gauge(col: &mut [Complex64]) {
    let mut best = 0usize;
    let mut best_mag = -1.0f64;
    for (i, c) in col.iter().enumerate() {
        let m = c.norm();
        if m > best_mag + 1e-12 {
            best_mag = m;
            best = i;
        }
    }
    if best_mag <= 0.0 {
        return;
    }
    let u = col[best].conj().unscale(col[best].norm());
    for c in col.iter_mut() {
        *c *= u;
    }
}

/// Smallest eigenvalue of a Hermitian matrix.
pub fn min_eigenvalue(m: &ComplexMatrix, herm_tol: f64) -> Result<f64> {
    Ok(eigh(m, herm_tol)?.min_value())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::qmat::matrix::projector;
    use rand::Rng;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn random_hermitian(n: usize, rng: &mut ChaCha8Rng) -> ComplexMatrix {
        let mut m = ComplexMatrix::zeros(n, n);
        for i in 0..n {
            for j in 0..n {
                m.set(
                    i,
                    j,
                    Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)),
                );
            }
        }
        m.hermitian_part()
    }

    #[test]
    fn diagonal_matrix_spectrum() {
        let m = ComplexMatrix::from_diag(&[0.3, -1.0, 2.5]);
        let eig = eigh(&m, 1e-9).unwrap();
        assert!((eig.values[0] + 1.0).abs() < 1e-14);
        assert!((eig.values[1] - 0.3).abs() < 1e-14);
        assert!((eig.values[2] - 2.5).abs() < 1e-14);
    }

    #[test]
    fn pauli_y_spectrum() {
        let m = ComplexMatrix::new(
            2,
            2,
            vec![
                Complex64::new(0.0, 0.0),
                Complex64::new(0.0, -1.0),
                Complex64::new(0.0, 1.0),
                Complex64::new(0.0, 0.0),
            ],
        )
        .unwrap();
        let eig = eigh(&m, 1e-9).unwrap();
        assert!((eig.values[0] + 1.0).abs() < 1e-14);
        assert!((eig.values[1] - 1.0).abs() < 1e-14);
    }

    #[test]
    fn roundtrip_random_hermitian_up_to_dim_16() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for n in [2usize, 3, 5, 8, 16] {
            let m = random_hermitian(n, &mut rng);
            let eig = eigh(&m, 1e-9).unwrap();
            let back = eig.reassemble();
            assert!(
                back.sub(&m).max_abs() < 1e-10,
                "roundtrip failed at dim {n}: {}",
                back.sub(&m).max_abs()
            );
            // orthonormality
            let gram = eig.vectors.adjoint().matmul(&eig.vectors);
            assert!(gram.sub(&ComplexMatrix::identity(n)).max_abs() < 1e-12);
            // ascending
            for k in 1..n {
                assert!(eig.values[k] >= eig.values[k - 1] - 1e-13);
            }
        }
    }

    #[test]
    fn deterministic_for_repeated_calls() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let m = random_hermitian(6, &mut rng);
        let e1 = eigh(&m, 1e-9).unwrap();
        let e2 = eigh(&m, 1e-9).unwrap();
        assert_eq!(e1.values, e2.values);
        assert_eq!(e1.vectors.data, e2.vectors.data);
    }

    #[test]
    fn degenerate_projector_gauge_is_stable() {
        let u = vec![
            Complex64::new(0.6, 0.0),
            Complex64::new(0.0, 0.8),
        ];
        let p = projector(&u);
        let e = eigh(&p, 1e-9).unwrap();
        assert!((e.values[1] - 1.0).abs() < 1e-12);
        // top eigenvector gauge: largest component real positive
        let top = e.vectors.column(1);
        assert!(top[1].im.abs() < 1e-12 && top[1].re > 0.0);
    }

    #[test]
    fn rejects_non_hermitian() {
        let m = ComplexMatrix::from_real(2, 2, &[0.0, 1.0, 0.0, 0.0]).unwrap();
        assert!(eigh(&m, 1e-9).is_err());
    }
}
