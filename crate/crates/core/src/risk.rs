use crate::error::{Error, Result};
use crate::property::PropertyValue;

/// Mean deviation between model predictions and test outcomes,
/// `(1/k) Σ |Q_T(D_j) − Q_M(S_j)|`.
pub fn empirical_error(predictions: &[PropertyValue], test_results: &[PropertyValue]) -> Result<f64> {
    if predictions.len() != test_results.len() {
        return Err(Error::LengthMismatch(predictions.len(), test_results.len()));
    }
    if predictions.is_empty() {
        return Err(Error::LengthMismatch(0, 0));
    }
    let mut total = 0.0;
    for (p, t) in predictions.iter().zip(test_results) {
        total += p.deviation(t)?;
    }
    Ok(total / predictions.len() as f64)
}

/// Fraction of disagreements between two binary label vectors.
pub fn binary_error(predictions: &[u8], labels: &[u8]) -> Result<f64> {
    if predictions.len() != labels.len() {
        return Err(Error::LengthMismatch(predictions.len(), labels.len()));
    }
    if predictions.is_empty() {
        return Err(Error::LengthMismatch(0, 0));
    }
    let wrong = predictions.iter().zip(labels).filter(|(p, l)| p != l).count();
    Ok(wrong as f64 / predictions.len() as f64)
}
