//! Subsystem bookkeeping: ordered dimensions and labels.

use crate::error::{Error, Result};

/// Ordered tensor factorization of a Hilbert space into labelled subsystems.
///
/// An empty factorization denotes the trivial one-dimensional space, which is
/// the identity element for [`Factorization::concat`].
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Factorization {
    dims: Vec<usize>,
    labels: Vec<String>,
}

impl Factorization {
    pub fn new(dims: Vec<usize>, labels: Vec<String>) -> Result<Self> {
        if dims.len() != labels.len() {
            return Err(Error::DimensionMismatch {
                expected: dims.len(),
                got: labels.len(),
            });
        }
        for &d in &dims {
            if d < 2 {
                return Err(Error::InvalidInput(format!(
                    "subsystem dimension must be at least 2, got {d}"
                )));
            }
        }
        for (i, l) in labels.iter().enumerate() {
            if labels[..i].contains(l) {
                return Err(Error::LabelCollision(l.clone()));
            }
        }
        Ok(Self { dims, labels })
    }

    /// Single subsystem.
    pub fn single(dim: usize, label: &str) -> Result<Self> {
        Self::new(vec![dim], vec![label.to_string()])
    }

    /// The trivial factorization of the one-dimensional space.
    pub fn scalar() -> Self {
        Self {
            dims: vec![],
            labels: vec![],
        }
    }

    pub fn dims(&self) -> &[usize] {
        &self.dims
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn subsystems(&self) -> usize {
        self.dims.len()
    }

    /// Product of subsystem dimensions (1 for the scalar factorization).
    pub fn total_dim(&self) -> usize {
        self.dims.iter().product()
    }

    pub fn position(&self, label: &str) -> Result<usize> {
        self.labels
            .iter()
            .position(|l| l == label)
            .ok_or_else(|| Error::UnknownLabel(label.to_string()))
    }

    pub fn dim_of(&self, label: &str) -> Result<usize> {
        Ok(self.dims[self.position(label)?])
    }

    /// Concatenation; fails on label collision.
    pub fn concat(&self, other: &Self) -> Result<Self> {
        for l in other.labels() {
            if self.labels.contains(l) {
                return Err(Error::LabelCollision(l.clone()));
            }
        }
        let mut dims = self.dims.clone();
        dims.extend_from_slice(&other.dims);
        let mut labels = self.labels.clone();
        labels.extend_from_slice(&other.labels);
        Ok(Self { dims, labels })
    }

    /// Row-major strides of the subsystem indices.
    pub fn strides(&self) -> Vec<usize> {
        let n = self.dims.len();
        let mut s = vec![1usize; n];
        for i in (0..n.saturating_sub(1)).rev() {
            s[i] = s[i + 1] * self.dims[i + 1];
        }
        s
    }

    /// Decode a flat index into per-subsystem indices.
    pub fn decode(&self, mut flat: usize) -> Vec<usize> {
        let strides = self.strides();
        let mut idx = Vec::with_capacity(self.dims.len());
        for s in strides {
            idx.push(flat / s);
            flat %= s;
        }
        idx
    }

    /// Encode per-subsystem indices into a flat index.
    pub fn encode(&self, idx: &[usize]) -> usize {
        self.strides()
            .iter()
            .zip(idx.iter())
            .map(|(s, i)| s * i)
            .sum()
    }

    /// Positions of the given labels, in the order they appear here.
    pub fn positions_of(&self, labels: &[&str]) -> Result<Vec<usize>> {
        let mut found = Vec::new();
        for l in labels {
            self.position(l)?;
        }
        for (i, l) in self.labels.iter().enumerate() {
            if labels.contains(&l.as_str()) {
                found.push(i);
            }
        }
        Ok(found)
    }

    /// Sub-factorization restricted to the given positions (original order).
    pub fn select(&self, positions: &[usize]) -> Self {
        Self {
            dims: positions.iter().map(|&p| self.dims[p]).collect(),
            labels: positions.iter().map(|&p| self.labels[p].clone()).collect(),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn concat_rejects_label_collision() {
        let a = Factorization::single(2, "S").unwrap();
        let b = Factorization::single(3, "S").unwrap();
        assert!(a.concat(&b).is_err());
    }

    #[test]
    fn encode_decode_roundtrip() {
        let f = Factorization::new(vec![3, 2, 2], vec!["A".into(), "B".into(), "C".into()]).unwrap();
        for flat in 0..f.total_dim() {
            assert_eq!(f.encode(&f.decode(flat)), flat);
        }
    }

    #[test]
    fn scalar_is_concat_identity() {
        let a = Factorization::single(2, "S").unwrap();
        let s = Factorization::scalar();
        assert_eq!(a.concat(&s).unwrap(), a);
        assert_eq!(s.total_dim(), 1);
    }

    #[test]
    fn rejects_dimension_one_subsystem() {
        assert!(Factorization::new(vec![1], vec!["X".into()]).is_err());
    }
}
