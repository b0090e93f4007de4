//! Free-set JSON format:
//! `{"variant": "...", "params": {...}, "rule": "...", "parts": [...]}`.

use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use super::{CompositionRule, FreeSet};
use crate::error::{Error, Result};
use crate::qmat::{Complex64, ComplexMatrix, MatrixJson};

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct FreeSetJson {
    pub variant: String,
    #[serde(default, skip_serializing_if = "Value::is_null")]
    pub params: Value,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub rule: Option<CompositionRule>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub parts: Vec<FreeSetJson>,
}

fn basis_to_json(basis: &ComplexMatrix) -> Value {
    let is_identity = basis
        .sub(&ComplexMatrix::identity(basis.rows))
        .max_abs()
        < 1e-15;
    if is_identity {
        json!({ "dim": basis.rows })
    } else {
        let cols: Vec<Vec<[f64; 2]>> = (0..basis.cols)
            .map(|j| basis.column(j).iter().map(|c| [c.re, c.im]).collect())
            .collect();
        json!({ "dim": basis.rows, "basis": cols })
    }
}

fn basis_from_json(params: &Value) -> Result<ComplexMatrix> {
    let dim = params
        .get("dim")
        .and_then(Value::as_u64)
        .ok_or_else(|| Error::InvalidInput("free-set params missing dim".into()))? as usize;
    match params.get("basis") {
        None => Ok(ComplexMatrix::identity(dim)),
        Some(cols) => {
            let cols: Vec<Vec<[f64; 2]>> = serde_json::from_value(cols.clone())?;
            if cols.len() != dim {
                return Err(Error::DimensionMismatch {
                    expected: dim,
                    got: cols.len(),
                });
            }
            let mut m = ComplexMatrix::zeros(dim, dim);
            for (j, col) in cols.iter().enumerate() {
                if col.len() != dim {
                    return Err(Error::DimensionMismatch {
                        expected: dim,
                        got: col.len(),
                    });
                }
                for (i, &[re, im]) in col.iter().enumerate() {
                    m.set(i, j, Complex64::new(re, im));
                }
            }
            Ok(m)
        }
    }
}

impl FreeSetJson {
    pub fn from_freeset(f: &FreeSet) -> Self {
        match f {
            FreeSet::Singleton(g) => Self {
                variant: "singleton".into(),
                params: json!({ "state": MatrixJson::from_state(g) }),
                rule: None,
                parts: vec![],
            },
            FreeSet::Incoherent { basis } => Self {
                variant: "incoherent".into(),
                params: basis_to_json(basis),
                rule: None,
                parts: vec![],
            },
            FreeSet::Real { basis } => Self {
                variant: "real".into(),
                params: basis_to_json(basis),
                rule: None,
                parts: vec![],
            },
            FreeSet::GroundState { dim, level } => Self {
                variant: "ground_state".into(),
                params: json!({ "dim": dim, "level": level }),
                rule: None,
                parts: vec![],
            },
            FreeSet::SeparableDesk { dims } => Self {
                variant: "separable".into(),
                params: json!({ "dims": [dims.0, dims.1] }),
                rule: None,
                parts: vec![],
            },
            FreeSet::Composite { rule, parts } => Self {
                variant: "composite".into(),
                params: Value::Null,
                rule: Some(*rule),
                parts: parts.iter().map(Self::from_freeset).collect(),
            },
        }
    }

    pub fn to_freeset(&self) -> Result<FreeSet> {
        match self.variant.as_str() {
            "singleton" => {
                let state: MatrixJson = serde_json::from_value(
                    self.params
                        .get("state")
                        .cloned()
                        .ok_or_else(|| Error::InvalidInput("singleton needs a state".into()))?,
                )?;
                Ok(FreeSet::Singleton(state.to_state()?))
            }
            "incoherent" => Ok(FreeSet::Incoherent {
                basis: basis_from_json(&self.params)?,
            }),
            "real" => Ok(FreeSet::Real {
                basis: basis_from_json(&self.params)?,
            }),
            "ground_state" => {
                let dim = self
                    .params
                    .get("dim")
                    .and_then(Value::as_u64)
                    .ok_or_else(|| Error::InvalidInput("ground_state needs dim".into()))?;
                let level = self.params.get("level").and_then(Value::as_u64).unwrap_or(0);
                Ok(FreeSet::GroundState {
                    dim: dim as usize,
                    level: level as usize,
                })
            }
            "separable" => {
                let dims: Vec<usize> = serde_json::from_value(
                    self.params
                        .get("dims")
                        .cloned()
                        .ok_or_else(|| Error::InvalidInput("separable needs dims".into()))?,
                )?;
                if dims.len() != 2 {
                    return Err(Error::InvalidInput("separable dims must be a pair".into()));
                }
                Ok(FreeSet::SeparableDesk {
                    dims: (dims[0], dims[1]),
                })
            }
            "composite" => {
                let rule = self
                    .rule
                    .ok_or_else(|| Error::InvalidInput("composite needs a rule".into()))?;
                let parts = self
                    .parts
                    .iter()
                    .map(|p| p.to_freeset())
                    .collect::<Result<Vec<_>>>()?;
                super::compose(parts, rule)
            }
            other => Err(Error::InvalidInput(format!("unknown free-set variant {other:?}"))),
        }
    }
}
