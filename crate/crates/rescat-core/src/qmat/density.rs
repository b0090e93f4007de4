//! Density matrices with tolerance-checked invariants and the tensor /
//! partial-trace / trace-distance primitives used throughout the workbench.

use super::eig::{eigh, HermitianEig};
use super::fact::Factorization;
use super::matrix::{Complex64, ComplexMatrix};
use crate::error::{Error, Result};

/// Default tolerance for Hermiticity, positivity and normalization checks.
pub const DEFAULT_TOL: f64 = 1e-9;

/// Positive unit-trace Hermitian matrix with an explicit subsystem
/// factorization.
#[derive(Debug, Clone, PartialEq)]
pub struct DensityMatrix {
    pub mat: ComplexMatrix,
    pub fact: Factorization,
    pub herm_tol: f64,
    pub psd_tol: f64,
    pub trace_tol: f64,
}

impl DensityMatrix {
    /// Validate and wrap a matrix with default tolerances (1e-9 across the
    /// board). Every violated invariant reports its margin.
    pub fn new(mat: ComplexMatrix, fact: Factorization) -> Result<Self> {
        Self::with_tols(mat, fact, DEFAULT_TOL, DEFAULT_TOL, DEFAULT_TOL)
    }

    pub fn with_tols(
        mat: ComplexMatrix,
        fact: Factorization,
        herm_tol: f64,
        psd_tol: f64,
        trace_tol: f64,
    ) -> Result<Self> {
        if !mat.is_square() {
            return Err(Error::DimensionMismatch {
                expected: mat.rows,
                got: mat.cols,
            });
        }
        if mat.rows != fact.total_dim() {
            return Err(Error::DimensionMismatch {
                expected: fact.total_dim(),
                got: mat.rows,
            });
        }
        let dev = mat.herm_deviation();
        if dev > herm_tol {
            return Err(Error::NotHermitian {
                deviation: dev,
                tol: herm_tol,
            });
        }
        let tr = mat.trace();
        if (tr.re - 1.0).abs() > trace_tol || tr.im.abs() > trace_tol {
            return Err(Error::TraceNotOne {
                trace: tr.re,
                tol: trace_tol,
            });
        }
        let min_eig = eigh(&mat, herm_tol)?.min_value();
        if min_eig < -psd_tol {
            return Err(Error::NotPsd {
                min_eig,
                tol: psd_tol,
            });
        }
        Ok(Self {
            mat,
            fact,
            herm_tol,
            psd_tol,
            trace_tol,
        })
    }

    /// Matrix dimension.
    pub fn dim(&self) -> usize {
        self.mat.rows
    }

    pub fn labels(&self) -> &[String] {
        self.fact.labels()
    }

    /// Diagonal state on a single subsystem.
    pub fn from_probs(probs: &[f64], label: &str) -> Result<Self> {
        let fact = Factorization::single(probs.len(), label)?;
        Self::new(ComplexMatrix::from_diag(probs), fact)
    }

    /// Pure state |ψ⟩⟨ψ| from (unnormalized) amplitudes.
    pub fn pure(amplitudes: &[Complex64], fact: Factorization) -> Result<Self> {
        Self::new(super::matrix::projector(amplitudes), fact)
    }

    /// Maximally mixed state on the given factorization.
    pub fn maximally_mixed(fact: Factorization) -> Self {
        let d = fact.total_dim();
        Self {
            mat: ComplexMatrix::identity(d).scale_re(1.0 / d as f64),
            fact,
            herm_tol: DEFAULT_TOL,
            psd_tol: DEFAULT_TOL,
            trace_tol: DEFAULT_TOL,
        }
    }

    /// Eigendecomposition of the state.
    pub fn eig(&self) -> Result<HermitianEig> {
        eigh(&self.mat, self.herm_tol)
    }

    /// Keep the same labels but replace the matrix, re-validating.
    pub fn replace_mat(&self, mat: ComplexMatrix) -> Result<Self> {
        Self::with_tols(
            mat,
            self.fact.clone(),
            self.herm_tol,
            self.psd_tol,
            self.trace_tol,
        )
    }
}

/// Kronecker product of two states. The factorization of the result is the
/// concatenation of the two inputs; label collisions are rejected.
pub fn tensor(a: &DensityMatrix, b: &DensityMatrix) -> Result<DensityMatrix> {
    let fact = a.fact.concat(&b.fact)?;
    let mat = a.mat.kron(&b.mat);
    DensityMatrix::with_tols(
        mat,
        fact,
        a.herm_tol.max(b.herm_tol),
        a.psd_tol.max(b.psd_tol),
        a.trace_tol.max(b.trace_tol),
    )
}

/// Partial trace keeping the listed labels, which must form a nonempty subset.
/// The kept subsystems remain in their original order.
pub fn partial_trace(rho: &DensityMatrix, keep: &[&str]) -> Result<DensityMatrix> {
    if keep.is_empty() {
        return Err(Error::InvalidInput("keep set must be nonempty".into()));
    }
    let mat = partial_trace_mat(&rho.mat, &rho.fact, keep)?;
    let keep_pos = rho.fact.positions_of(keep)?;
    let fact = rho.fact.select(&keep_pos);
    DensityMatrix::with_tols(mat, fact, rho.herm_tol, rho.psd_tol, rho.trace_tol)
}

/// Partial trace on a raw operator (no state validation); used for operator
/// bases and channel internals.
pub fn partial_trace_mat(
    mat: &ComplexMatrix,
    fact: &Factorization,
    keep: &[&str],
) -> Result<ComplexMatrix> {
    let keep_pos = fact.positions_of(keep)?;
    if keep_pos.len() != keep.len() {
        // positions_of validated all labels exist; duplicates collapse
        return Err(Error::InvalidInput("duplicate labels in keep set".into()));
    }
    let all: Vec<usize> = (0..fact.subsystems()).collect();
    let trace_pos: Vec<usize> = all.iter().copied().filter(|p| !keep_pos.contains(p)).collect();

    let keep_fact = fact.select(&keep_pos);
    let trace_fact = fact.select(&trace_pos);
    let dk = keep_fact.total_dim();
    let dt = trace_fact.total_dim();

    let mut out = ComplexMatrix::zeros(dk, dk);
    let mut full_row = vec![0usize; fact.subsystems()];
    let mut full_col = vec![0usize; fact.subsystems()];
    for i in 0..dk {
        let ki = keep_fact.decode(i);
        for j in 0..dk {
            let kj = keep_fact.decode(j);
            let mut acc = Complex64::new(0.0, 0.0);
            for t in 0..dt {
                let ti = trace_fact.decode(t);
                for (slot, &p) in keep_pos.iter().enumerate() {
                    full_row[p] = ki[slot];
                    full_col[p] = kj[slot];
                }
                for (slot, &p) in trace_pos.iter().enumerate() {
                    full_row[p] = ti[slot];
                    full_col[p] = ti[slot];
                }
                acc += mat.get(fact.encode(&full_row), fact.encode(&full_col));
            }
            out.set(i, j, acc);
        }
    }
    Ok(out)
}

/// Place two operators on disjoint label sets of a common factorization.
/// `pos_a` and `pos_b` must partition the subsystem positions.
pub fn product_on_positions(
    fact: &Factorization,
    a: &ComplexMatrix,
    pos_a: &[usize],
    b: &ComplexMatrix,
    pos_b: &[usize],
) -> ComplexMatrix {
    let d = fact.total_dim();
    let fact_a = fact.select(pos_a);
    let fact_b = fact.select(pos_b);
    debug_assert_eq!(fact_a.total_dim(), a.rows);
    debug_assert_eq!(fact_b.total_dim(), b.rows);
    let mut out = ComplexMatrix::zeros(d, d);
    for i in 0..d {
        let fi = fact.decode(i);
        let ia = fact_a.encode(&pos_a.iter().map(|&p| fi[p]).collect::<Vec<_>>());
        let ib = fact_b.encode(&pos_b.iter().map(|&p| fi[p]).collect::<Vec<_>>());
        for j in 0..d {
            let fj = fact.decode(j);
            let ja = fact_a.encode(&pos_a.iter().map(|&p| fj[p]).collect::<Vec<_>>());
            let jb = fact_b.encode(&pos_b.iter().map(|&p| fj[p]).collect::<Vec<_>>());
            out.set(i, j, a.get(ia, ja) * b.get(ib, jb));
        }
    }
    out
}

/// Trace distance ‖ρ - σ‖₁, the unhalved sum of absolute eigenvalues of the
/// difference. Symmetric; zero exactly when the states agree.
pub fn trace_distance(rho: &DensityMatrix, sigma: &DensityMatrix) -> Result<f64> {
    if rho.dim() != sigma.dim() {
        return Err(Error::DimensionMismatch {
            expected: rho.dim(),
            got: sigma.dim(),
        });
    }
    trace_norm(&rho.mat.sub(&sigma.mat))
}

/// Trace norm of a Hermitian operator.
pub fn trace_norm(m: &ComplexMatrix) -> Result<f64> {
    let eig = eigh(m, 1e-7)?;
    Ok(eig.values.iter().map(|v| v.abs()).sum())
}

/// PSD check with diagnostics: true iff λ_min ≥ -tol; the minimum eigenvalue
/// is always returned. Fails on non-Hermitian input.
pub fn is_psd(m: &ComplexMatrix, tol: f64) -> Result<(bool, f64)> {
    let min_eig = eigh(m, DEFAULT_TOL)?.min_value();
    Ok((min_eig >= -tol, min_eig))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::qmat::matrix::basis_ket;

    fn qubit_fact(label: &str) -> Factorization {
        Factorization::single(2, label).unwrap()
    }

    #[test]
    fn tensor_of_diagonals_is_kron() {
        let a = DensityMatrix::from_probs(&[1.0, 0.0], "A").unwrap();
        let b = DensityMatrix::from_probs(&[0.5, 0.5], "B").unwrap();
        let t = tensor(&a, &b).unwrap();
        let expected = ComplexMatrix::from_diag(&[0.5, 0.5, 0.0, 0.0]);
        assert!(t.mat.sub(&expected).max_abs() < 1e-15);
        assert_eq!(t.labels(), &["A".to_string(), "B".to_string()]);
        assert!((t.mat.trace().re - 1.0).abs() < 1e-15);
    }

    #[test]
    fn tensor_preserves_purity() {
        let zero = DensityMatrix::pure(&basis_ket(2, 0), qubit_fact("A")).unwrap();
        let plus = DensityMatrix::pure(
            &[Complex64::new(1.0, 0.0), Complex64::new(1.0, 0.0)],
            qubit_fact("B"),
        )
        .unwrap();
        let t = tensor(&zero, &plus).unwrap();
        let purity = t.mat.matmul(&t.mat).trace().re;
        assert!((purity - 1.0).abs() < 1e-12);
    }

    #[test]
    fn tensor_with_scalar_factor_is_identity() {
        let rho = DensityMatrix::from_probs(&[0.7, 0.3], "S").unwrap();
        let unit = DensityMatrix::new(ComplexMatrix::identity(1), Factorization::scalar()).unwrap();
        let out = tensor(&rho, &unit).unwrap();
        assert_eq!(out.mat.data, rho.mat.data);
        assert_eq!(out.fact, rho.fact);
    }

    #[test]
    fn bell_state_marginal_is_maximally_mixed() {
        let amp = [
            Complex64::new(1.0, 0.0),
            Complex64::new(0.0, 0.0),
            Complex64::new(0.0, 0.0),
            Complex64::new(1.0, 0.0),
        ];
        let fact = Factorization::new(vec![2, 2], vec!["A".into(), "B".into()]).unwrap();
        let bell = DensityMatrix::pure(&amp, fact).unwrap();
        let red = partial_trace(&bell, &["A"]).unwrap();
        let expected = ComplexMatrix::from_diag(&[0.5, 0.5]);
        assert!(red.mat.sub(&expected).max_abs() < 1e-14);
    }

    #[test]
    fn product_state_marginal_recovers_factor() {
        let rho = DensityMatrix::from_probs(&[0.2, 0.3, 0.5], "S").unwrap();
        let tau = DensityMatrix::from_probs(&[0.9, 0.1], "C").unwrap();
        let joint = tensor(&rho, &tau).unwrap();
        let red = partial_trace(&joint, &["S"]).unwrap();
        assert!(red.mat.sub(&rho.mat).max_abs() < 1e-14);
    }

    #[test]
    fn ghz_diagonal_single_marginal() {
        // 3-party GHZ-diagonal test state; single-subsystem marginal is
        // maximally mixed. Oracle: brute-force index summation below.
        let fact =
            Factorization::new(vec![2, 2, 2], vec!["A".into(), "B".into(), "C".into()]).unwrap();
        let mut m = ComplexMatrix::zeros(8, 8);
        m.set(0, 0, Complex64::new(0.5, 0.0));
        m.set(7, 7, Complex64::new(0.5, 0.0));
        let ghz_diag = DensityMatrix::new(m, fact).unwrap();
        let red = partial_trace(&ghz_diag, &["B"]).unwrap();

        // brute-force oracle over raw indices
        let mut oracle = [[Complex64::new(0.0, 0.0); 2]; 2];
        for bi in 0..2usize {
            for bj in 0..2usize {
                let mut acc = Complex64::new(0.0, 0.0);
                for a in 0..2usize {
                    for c in 0..2usize {
                        let row = a * 4 + bi * 2 + c;
                        let col = a * 4 + bj * 2 + c;
                        acc += ghz_diag.mat.get(row, col);
                    }
                }
                oracle[bi][bj] = acc;
            }
        }
        for i in 0..2 {
            for j in 0..2 {
                assert!((red.mat.get(i, j) - oracle[i][j]).norm() < 1e-14);
            }
        }
        let expected = ComplexMatrix::from_diag(&[0.5, 0.5]);
        assert!(red.mat.sub(&expected).max_abs() < 1e-14);
    }

    #[test]
    fn trace_distance_orthogonal_pure_states() {
        let zero = DensityMatrix::pure(&basis_ket(2, 0), qubit_fact("S")).unwrap();
        let one = DensityMatrix::pure(&basis_ket(2, 1), qubit_fact("S")).unwrap();
        assert!((trace_distance(&zero, &one).unwrap() - 2.0).abs() < 1e-14);
        assert!(trace_distance(&zero, &zero).unwrap() < 1e-14);
    }

    #[test]
    fn trace_distance_diagonal_perturbation() {
        let q1 = 5.0 / 13.0;
        let q2 = 8.0 / 13.0;
        let a = DensityMatrix::from_probs(&[q1 + 0.01, q2 - 0.01], "C").unwrap();
        let b = DensityMatrix::from_probs(&[q1, q2], "C").unwrap();
        assert!((trace_distance(&a, &b).unwrap() - 0.02).abs() < 1e-14);
    }

    #[test]
    fn psd_check_tolerates_numerical_dust() {
        let m = ComplexMatrix::from_diag(&[1.0, -1e-12]);
        let (ok, min_eig) = is_psd(&m, 1e-9).unwrap();
        assert!(ok);
        assert!(min_eig < 0.0);
    }

    #[test]
    fn psd_check_flags_pauli_z() {
        let m = ComplexMatrix::from_diag(&[1.0, -1.0]);
        let (ok, min_eig) = is_psd(&m, 1e-9).unwrap();
        assert!(!ok);
        assert!((min_eig + 1.0).abs() < 1e-13);
    }

    #[test]
    fn psd_check_broadcast_feasibility_arithmetic() {
        let m = ComplexMatrix::from_diag(&[0.6, 0.1]);
        let (ok, min_eig) = is_psd(&m, 1e-9).unwrap();
        assert!(ok);
        assert!((min_eig - 0.1).abs() < 1e-13);
    }

    #[test]
    fn psd_check_rejects_non_hermitian() {
        let m = ComplexMatrix::from_real(2, 2, &[0.0, 1.0, 0.0, 0.0]).unwrap();
        assert!(is_psd(&m, 1e-9).is_err());
    }

    #[test]
    fn invalid_state_reports_margin() {
        let m = ComplexMatrix::from_diag(&[1.2, -0.2]);
        let err = DensityMatrix::new(m, qubit_fact("S")).unwrap_err();
        match err {
            Error::NotPsd { min_eig, .. } => assert!((min_eig + 0.2).abs() < 1e-12),
            other => panic!("expected NotPsd, got {other:?}"),
        }
    }
}
