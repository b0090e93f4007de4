//! JSON formats for matrices and states.
//!
//! A square operator is serialized as `{"dims": [...], "labels": [...],
//! "data": [[re, im], ...]}` with row-major data. Round-trips are bit-exact
//! at double precision. Rectangular matrices (Kraus operators) use the raw
//! form `{"rows": r, "cols": c, "data": [[re, im], ...]}`.

use serde::{Deserialize, Serialize};

use super::density::DensityMatrix;
use super::fact::Factorization;
use super::matrix::{Complex64, ComplexMatrix};
use crate::error::{Error, Result};

/// Square operator with subsystem structure.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct MatrixJson {
    pub dims: Vec<usize>,
    pub labels: Vec<String>,
    pub data: Vec<[f64; 2]>,
}

impl MatrixJson {
    pub fn from_parts(mat: &ComplexMatrix, fact: &Factorization) -> Self {
        Self {
            dims: fact.dims().to_vec(),
            labels: fact.labels().to_vec(),
            data: mat.data.iter().map(|c| [c.re, c.im]).collect(),
        }
    }

    pub fn from_state(rho: &DensityMatrix) -> Self {
        Self::from_parts(&rho.mat, &rho.fact)
    }

    pub fn factorization(&self) -> Result<Factorization> {
        Factorization::new(self.dims.clone(), self.labels.clone())
    }

    pub fn matrix(&self) -> Result<ComplexMatrix> {
        let d: usize = self.dims.iter().product();
        if self.data.len() != d * d {
            return Err(Error::DimensionMismatch {
                expected: d * d,
                got: self.data.len(),
            });
        }
        ComplexMatrix::new(
            d,
            d,
            self.data.iter().map(|&[re, im]| Complex64::new(re, im)).collect(),
        )
    }

    /// Decode as a validated density matrix.
    pub fn to_state(&self) -> Result<DensityMatrix> {
        DensityMatrix::new(self.matrix()?, self.factorization()?)
    }
}

/// Rectangular complex matrix (Kraus operator style).
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct RawMatrixJson {
    pub rows: usize,
    pub cols: usize,
    pub data: Vec<[f64; 2]>,
}

impl RawMatrixJson {
    pub fn from_matrix(m: &ComplexMatrix) -> Self {
        Self {
            rows: m.rows,
            cols: m.cols,
            data: m.data.iter().map(|c| [c.re, c.im]).collect(),
        }
    }

    pub fn matrix(&self) -> Result<ComplexMatrix> {
        ComplexMatrix::new(
            self.rows,
            self.cols,
            self.data.iter().map(|&[re, im]| Complex64::new(re, im)).collect(),
        )
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn state_roundtrip_is_bit_exact() {
        let fact = Factorization::new(vec![2], vec!["S".into()]).unwrap();
        let mut m = ComplexMatrix::zeros(2, 2);
        m.set(0, 0, Complex64::new(0.1 + 0.2, 0.0)); // deliberately non-representable sum
        m.set(1, 1, Complex64::new(1.0 - (0.1 + 0.2), 0.0));
        m.set(0, 1, Complex64::new(0.25, 1.0 / 3.0));
        m.set(1, 0, Complex64::new(0.25, -1.0 / 3.0));
        let rho = DensityMatrix::new(m, fact).unwrap();

        let text = serde_json::to_string(&MatrixJson::from_state(&rho)).unwrap();
        let back: MatrixJson = serde_json::from_str(&text).unwrap();
        let rho2 = back.to_state().unwrap();
        assert_eq!(rho.mat.data, rho2.mat.data);
        assert_eq!(rho.fact, rho2.fact);
    }
}
