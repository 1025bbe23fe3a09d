use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use super::{check_non_constant, gaussian_gram, mean, resolve_bandwidth, Bandwidth};
use crate::error::{Error, Result};

pub const MIN_REGRESSION_SAMPLES: usize = 20;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Ridge {
    /// `λ = c · l`.
    PerSample(f64),
    Fixed(f64),
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct KrrConfig {
    pub bandwidth: Bandwidth,
    pub ridge: Ridge,
}

impl Default for KrrConfig {
    fn default() -> Self {
        KrrConfig { bandwidth: Bandwidth::Median, ridge: Ridge::PerSample(1e-3) }
    }
}

/// Residuals `y − f̂(x)` of Gaussian-kernel ridge regression with default
/// hyperparameters.
pub fn kernel_regress(x: &[f64], y: &[f64]) -> Result<Vec<f64>> {
    kernel_regress_with(x, y, &KrrConfig::default())
}

/// The intercept is unpenalized: `y` is centered before the solve. With
/// `(K + λI)α = y − ȳ` the residual is exactly `λα`.
pub fn kernel_regress_with(x: &[f64], y: &[f64], cfg: &KrrConfig) -> Result<Vec<f64>> {
    if x.len() != y.len() {
        return Err(Error::LengthMismatch(x.len(), y.len()));
    }
    let l = x.len();
    if l < MIN_REGRESSION_SAMPLES {
        return Err(Error::DegenerateInput(format!("{l} samples, regression needs at least {MIN_REGRESSION_SAMPLES}")));
    }
    check_non_constant(x, "regressor")?;
    let lambda = match cfg.ridge {
        Ridge::PerSample(c) => c * l as f64,
        Ridge::Fixed(v) => v,
    };
    if !(lambda > 0.0) {
        return Err(Error::InvalidParams(format!("ridge must be positive, got {lambda}")));
    }
    let sigma = resolve_bandwidth(cfg.bandwidth, x);
    let mut k = DMatrix::from_vec(l, l, gaussian_gram(x, sigma));
    for i in 0..l {
        k[(i, i)] += lambda;
    }
    let ybar = mean(y);
    let rhs = DVector::from_iterator(l, y.iter().map(|v| v - ybar));
    let chol = k
        .cholesky()
        .ok_or_else(|| Error::DegenerateInput("kernel system not positive definite".into()))?;
    let alpha = chol.solve(&rhs);
    Ok(alpha.iter().map(|a| lambda * a).collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng;
    use rand::Rng;

    fn rms(v: &[f64]) -> f64 {
        (v.iter().map(|x| x * x).sum::<f64>() / v.len() as f64).sqrt()
    }

    fn var(v: &[f64]) -> f64 {
        super::super::variance(v)
    }

    #[test]
    fn constant_target() {
        let mut r = rng::rng(1);
        let x: Vec<f64> = (0..100).map(|_| r.random_range(-2.0..2.0)).collect();
        let res = kernel_regress(&x, &[3.0; 100]).unwrap();
        assert!(res.iter().all(|v| v.abs() < 1e-6));
    }

    #[test]
    fn smooth_function_fit() {
        let mut r = rng::rng(2);
        let x: Vec<f64> = (0..500).map(|_| r.random_range(-3.0..3.0)).collect();
        let y: Vec<f64> = x.iter().map(|v| v.sin()).collect();
        let res = kernel_regress(&x, &y).unwrap();
        assert!(rms(&res) < 0.05, "rms {}", rms(&res));
    }

    #[test]
    fn null_fit_keeps_variance() {
        let mut r = rng::rng(3);
        let x: Vec<f64> = (0..500).map(|_| r.random_range(0.0..1.0)).collect();
        let y: Vec<f64> = (0..500).map(|_| r.random_range(0.0..1.0)).collect();
        let res = kernel_regress(&x, &y).unwrap();
        let ratio = var(&res) / var(&y);
        assert!((ratio - 1.0).abs() < 0.1, "ratio {ratio}");
    }

    #[test]
    fn errors() {
        assert!(matches!(kernel_regress(&[1.0; 30], &[0.0; 30]), Err(Error::DegenerateInput(_))));
        let x: Vec<f64> = (0..10).map(f64::from).collect();
        assert!(matches!(kernel_regress(&x, &x), Err(Error::DegenerateInput(_))));
    }

    #[test]
    fn deterministic() {
        let x: Vec<f64> = (0..50).map(|i| (i as f64 * 0.37).cos()).collect();
        let y: Vec<f64> = x.iter().map(|v| v * v).collect();
        assert_eq!(kernel_regress(&x, &y).unwrap(), kernel_regress(&x, &y).unwrap());
    }
}
