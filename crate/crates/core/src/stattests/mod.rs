//! Statistical tests and estimators `Q_T` whose outcomes the causal models
//! are asked to predict.

mod anm;
mod corr;
mod hsic;
mod krr;
mod oracle;

pub use anm::{anm_test, anm_test_columns, AnmConfig, AnmOutcome, AnmTester};
pub use corr::{corr_estimate, fisher_z_ci, fisher_z_from_corr, sign_estimate, CorrelationMatrix, FisherZ};
pub use hsic::{hsic_independence, hsic_independence_with, HsicConfig, HsicResult, PValueMethod};
pub use krr::{kernel_regress, kernel_regress_with, KrrConfig};
pub use oracle::{DSeparationOracle, EdgeOracle};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::property::PropertyValue;
use crate::query::Query;

/// Variance below which a column counts as constant.
pub const MIN_VARIANCE: f64 = 1e-12;

/// Kernel bandwidth choice for Gaussian kernels.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Bandwidth {
    /// Median of the pairwise absolute differences.
    Median,
    Fixed(f64),
}

/// Result of a test or estimator.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TestOutcome {
    pub value: PropertyValue,
    /// Absent for pure estimators.
    pub p_value: Option<f64>,
    pub alpha: Option<f64>,
}

impl TestOutcome {
    /// Independence-type decision: value 1 iff `p > alpha` (ties reject).
    pub fn decide(p_value: f64, alpha: f64) -> Self {
        TestOutcome {
            value: PropertyValue::binary(p_value > alpha),
            p_value: Some(p_value),
            alpha: Some(alpha),
        }
    }

    pub fn estimate(value: PropertyValue) -> Self {
        TestOutcome { value, p_value: None, alpha: None }
    }

    pub fn binary(&self) -> Option<u8> {
        self.value.as_binary()
    }
}

/// Anything that can label a query with a test outcome: a statistical test
/// on data, or a ground-truth oracle.
pub trait Tester: Sync {
    fn test(&self, q: &Query) -> Result<TestOutcome>;
}

impl<T: Tester + ?Sized> Tester for &T {
    fn test(&self, q: &Query) -> Result<TestOutcome> {
        (**self).test(q)
    }
}

pub(crate) fn check_alpha(alpha: f64) -> Result<()> {
    if alpha > 0.0 && alpha < 1.0 {
        Ok(())
    } else {
        Err(Error::InvalidParams(format!("alpha must lie in (0,1), got {alpha}")))
    }
}

pub(crate) fn mean(x: &[f64]) -> f64 {
    x.iter().sum::<f64>() / x.len() as f64
}

pub(crate) fn variance(x: &[f64]) -> f64 {
    let m = mean(x);
    x.iter().map(|v| (v - m) * (v - m)).sum::<f64>() / x.len() as f64
}

pub(crate) fn check_non_constant(x: &[f64], what: &str) -> Result<()> {
    let v = variance(x);
    if !(v >= MIN_VARIANCE) {
        return Err(Error::DegenerateInput(format!("{what} is constant (variance {v:e})")));
    }
    Ok(())
}

/// Median of `|x_i − x_j|` over all pairs `i < j`; falls back to the median
/// of the strictly positive differences when ties make it zero.
pub(crate) fn median_distance(x: &[f64]) -> f64 {
    let n = x.len();
    let mut d = Vec::with_capacity(n * (n - 1) / 2);
    for i in 0..n {
        for j in i + 1..n {
            d.push((x[i] - x[j]).abs());
        }
    }
    let med = median_in_place(&mut d);
    if med > 0.0 {
        return med;
    }
    let mut pos: Vec<f64> = d.into_iter().filter(|v| *v > 0.0).collect();
    if pos.is_empty() {
        1.0
    } else {
        median_in_place(&mut pos)
    }
}

fn median_in_place(v: &mut [f64]) -> f64 {
    let mid = v.len() / 2;
    let (_, m, _) = v.select_nth_unstable_by(mid, |a, b| a.total_cmp(b));
    *m
}

pub(crate) fn resolve_bandwidth(b: Bandwidth, x: &[f64]) -> f64 {
    match b {
        Bandwidth::Median => median_distance(x),
        Bandwidth::Fixed(s) => s,
    }
}

/// Gaussian Gram matrix `exp(−(x_i − x_j)² / (2σ²))`, row-major.
pub(crate) fn gaussian_gram(x: &[f64], sigma: f64) -> Vec<f64> {
    let n = x.len();
    let c = -1.0 / (2.0 * sigma * sigma);
    let mut k = vec![0.0; n * n];
    for i in 0..n {
        k[i * n + i] = 1.0;
        for j in i + 1..n {
            let d = x[i] - x[j];
            let v = (c * d * d).exp();
            k[i * n + j] = v;
            k[j * n + i] = v;
        }
    }
    k
}
