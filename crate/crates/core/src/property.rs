//! Values a statistical property can take.
//!
//! Binary convention: `1` means the property holds (e.g. independence),
//! `0` that it does not. Signs are `-1` / `+1`.

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

const SYM_TOL: f64 = 1e-9;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", content = "value", rename_all = "lowercase")]
pub enum PropertyValue {
    Binary(u8),
    Real(f64),
    Sign(i8),
    /// Symmetric positive semi-definite matrix, row-major.
    Matrix(Vec<Vec<f64>>),
}

impl PropertyValue {
    pub fn binary(holds: bool) -> Self {
        PropertyValue::Binary(holds as u8)
    }

    pub fn sign_of(x: f64) -> Self {
        PropertyValue::Sign(if x < 0.0 { -1 } else { 1 })
    }

    pub fn matrix(rows: Vec<Vec<f64>>) -> Result<Self> {
        let v = PropertyValue::Matrix(rows);
        v.validate()?;
        Ok(v)
    }

    pub fn tag(&self) -> &'static str {
        match self {
            PropertyValue::Binary(_) => "binary",
            PropertyValue::Real(_) => "real",
            PropertyValue::Sign(_) => "sign",
            PropertyValue::Matrix(_) => "matrix",
        }
    }

    pub fn as_binary(&self) -> Option<u8> {
        match self {
            PropertyValue::Binary(b) => Some(*b),
            _ => None,
        }
    }

    pub fn as_real(&self) -> Option<f64> {
        match self {
            PropertyValue::Real(x) => Some(*x),
            _ => None,
        }
    }

    pub fn validate(&self) -> Result<()> {
        match self {
            PropertyValue::Binary(b) if *b > 1 => {
                Err(Error::InvalidValue(format!("binary value {b}")))
            }
            PropertyValue::Sign(s) if *s != 1 && *s != -1 => {
                Err(Error::InvalidValue(format!("sign value {s}")))
            }
            PropertyValue::Real(x) if !x.is_finite() => {
                Err(Error::InvalidValue(format!("real value {x}")))
            }
            PropertyValue::Matrix(rows) => validate_psd(rows),
            _ => Ok(()),
        }
    }

    /// Loss between two values of the same kind: absolute difference for
    /// binary and real values, 0/1 disagreement for signs, and the largest
    /// elementwise absolute difference for matrices.
    pub fn deviation(&self, other: &PropertyValue) -> Result<f64> {
        match (self, other) {
            (PropertyValue::Binary(a), PropertyValue::Binary(b)) => Ok((*a as f64 - *b as f64).abs()),
            (PropertyValue::Real(a), PropertyValue::Real(b)) => Ok((a - b).abs()),
            (PropertyValue::Sign(a), PropertyValue::Sign(b)) => Ok(if a == b { 0.0 } else { 1.0 }),
            (PropertyValue::Matrix(a), PropertyValue::Matrix(b)) => {
                if a.len() != b.len() || a.iter().zip(b).any(|(x, y)| x.len() != y.len()) {
                    return Err(Error::InvalidValue("matrix shapes differ".into()));
                }
                Ok(a.iter()
                    .flatten()
                    .zip(b.iter().flatten())
                    .map(|(x, y)| (x - y).abs())
                    .fold(0.0, f64::max))
            }
            _ => Err(Error::TagMismatch(self.tag(), other.tag())),
        }
    }
}

pub(crate) fn to_dmatrix(rows: &[Vec<f64>]) -> Result<DMatrix<f64>> {
    let n = rows.len();
    if n == 0 || rows.iter().any(|r| r.len() != n) {
        return Err(Error::InvalidValue("matrix must be square and non-empty".into()));
    }
    Ok(DMatrix::from_fn(n, n, |i, j| rows[i][j]))
}

/// Smallest eigenvalue of a symmetric matrix.
pub(crate) fn min_eigenvalue(m: &DMatrix<f64>) -> f64 {
    m.clone().symmetric_eigenvalues().iter().copied().fold(f64::INFINITY, f64::min)
}

fn validate_psd(rows: &[Vec<f64>]) -> Result<()> {
    let m = to_dmatrix(rows)?;
    let n = m.nrows();
    for i in 0..n {
        for j in 0..n {
            if !m[(i, j)].is_finite() || (m[(i, j)] - m[(j, i)]).abs() > SYM_TOL {
                return Err(Error::InvalidValue("matrix is not symmetric".into()));
            }
        }
    }
    if min_eigenvalue(&m) < -SYM_TOL {
        return Err(Error::InvalidValue("matrix is not positive semi-definite".into()));
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn validation() {
        assert!(PropertyValue::Binary(2).validate().is_err());
        assert!(PropertyValue::Sign(0).validate().is_err());
        assert!(PropertyValue::matrix(vec![vec![1.0, 2.0], vec![2.0, 1.0]]).is_err());
        assert!(PropertyValue::matrix(vec![vec![1.0, 0.5], vec![0.4, 1.0]]).is_err());
        assert!(PropertyValue::matrix(vec![vec![1.0, 0.5], vec![0.5, 1.0]]).is_ok());
    }

    #[test]
    fn deviations() {
        let d = PropertyValue::Binary(1).deviation(&PropertyValue::Binary(0)).unwrap();
        assert_eq!(d, 1.0);
        assert_eq!(PropertyValue::Sign(-1).deviation(&PropertyValue::Sign(1)).unwrap(), 1.0);
        assert!(matches!(
            PropertyValue::Binary(1).deviation(&PropertyValue::Real(1.0)),
            Err(Error::TagMismatch("binary", "real"))
        ));
    }

    #[test]
    fn json_shape() {
        let s = serde_json::to_string(&PropertyValue::Binary(1)).unwrap();
        assert_eq!(s, r#"{"type":"binary","value":1}"#);
    }
}
