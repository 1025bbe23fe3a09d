use rand::seq::SliceRandom;
use serde::{Deserialize, Serialize};
use statrs::distribution::{ContinuousCDF, Gamma};

use super::{check_alpha, check_non_constant, gaussian_gram, resolve_bandwidth, Bandwidth, TestOutcome};
use crate::error::{Error, Result};
use crate::rng;

pub const MIN_HSIC_SAMPLES: usize = 20;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PValueMethod {
    /// Gamma moment-matching of the null distribution.
    Gamma,
    /// Permutation null with `rounds` reshuffles of `y`.
    Permutation { rounds: usize, seed: u64 },
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct HsicConfig {
    pub bandwidth_x: Bandwidth,
    pub bandwidth_y: Bandwidth,
    pub method: PValueMethod,
}

impl Default for HsicConfig {
    fn default() -> Self {
        HsicConfig { bandwidth_x: Bandwidth::Median, bandwidth_y: Bandwidth::Median, method: PValueMethod::Gamma }
    }
}

impl HsicConfig {
    pub fn permutation(rounds: usize, seed: u64) -> Self {
        HsicConfig { method: PValueMethod::Permutation { rounds, seed }, ..Default::default() }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HsicResult {
    /// `m · HSIC_b`, i.e. `tr(K̃ L̃) / m`.
    pub statistic: f64,
    pub p_value: f64,
}

/// HSIC independence test with Gaussian kernels and the default config.
pub fn hsic_independence(x: &[f64], y: &[f64], alpha: f64) -> Result<TestOutcome> {
    hsic_independence_with(x, y, alpha, &HsicConfig::default())
}

pub fn hsic_independence_with(x: &[f64], y: &[f64], alpha: f64, cfg: &HsicConfig) -> Result<TestOutcome> {
    check_alpha(alpha)?;
    let r = hsic(x, y, cfg)?;
    Ok(TestOutcome::decide(r.p_value, alpha))
}

/// Doubly centered Gram matrix, via row means (the matrix is symmetric).
fn center(k: &[f64], m: usize) -> Vec<f64> {
    let row: Vec<f64> = (0..m).map(|i| k[i * m..(i + 1) * m].iter().sum::<f64>() / m as f64).collect();
    let total = row.iter().sum::<f64>() / m as f64;
    let mut c = vec![0.0; m * m];
    for i in 0..m {
        for j in 0..m {
            c[i * m + j] = k[i * m + j] - row[i] - row[j] + total;
        }
    }
    c
}

pub fn hsic(x: &[f64], y: &[f64], cfg: &HsicConfig) -> Result<HsicResult> {
    if x.len() != y.len() {
        return Err(Error::LengthMismatch(x.len(), y.len()));
    }
    let m = x.len();
    if m < MIN_HSIC_SAMPLES {
        return Err(Error::DegenerateInput(format!("{m} samples, HSIC needs at least {MIN_HSIC_SAMPLES}")));
    }
    check_non_constant(x, "x")?;
    check_non_constant(y, "y")?;
    let k = gaussian_gram(x, resolve_bandwidth(cfg.bandwidth_x, x));
    let l = gaussian_gram(y, resolve_bandwidth(cfg.bandwidth_y, y));
    let kc = center(&k, m);
    let lc = center(&l, m);
    let mf = m as f64;
    let statistic = kc.iter().zip(&lc).map(|(a, b)| a * b).sum::<f64>() / mf;

    let p_value = match cfg.method {
        PValueMethod::Gamma => gamma_p_value(statistic, &k, &l, &kc, &lc, m),
        PValueMethod::Permutation { rounds, seed } => {
            if rounds == 0 {
                return Err(Error::InvalidParams("permutation rounds must be positive".into()));
            }
            let mut r = rng::rng(seed);
            let mut perm: Vec<usize> = (0..m).collect();
            let mut exceed = 0usize;
            for _ in 0..rounds {
                perm.shuffle(&mut r);
                let mut s = 0.0;
                for i in 0..m {
                    let pi = perm[i] * m;
                    let ki = &kc[i * m..(i + 1) * m];
                    for j in 0..m {
                        s += ki[j] * lc[pi + perm[j]];
                    }
                }
                exceed += (s / mf >= statistic) as usize;
            }
            (exceed + 1) as f64 / (rounds + 1) as f64
        }
    };
    Ok(HsicResult { statistic, p_value })
}

fn gamma_p_value(stat: f64, k: &[f64], l: &[f64], kc: &[f64], lc: &[f64], m: usize) -> f64 {
    let mf = m as f64;
    let mut sum = 0.0;
    let mut trace = 0.0;
    for i in 0..m {
        for j in 0..m {
            let v = (kc[i * m + j] * lc[i * m + j] / 6.0).powi(2);
            sum += v;
            if i == j {
                trace += v;
            }
        }
    }
    let var = (sum - trace) / mf / (mf - 1.0) * 72.0 * (mf - 4.0) * (mf - 5.0)
        / (mf * (mf - 1.0) * (mf - 2.0) * (mf - 3.0));
    let off = |g: &[f64]| (g.iter().sum::<f64>() - mf) / (mf * (mf - 1.0));
    let (mu_x, mu_y) = (off(k), off(l));
    let mean = (1.0 + mu_x * mu_y - mu_x - mu_y) / mf;
    if !(var > 0.0) || !(mean > 0.0) {
        return if stat > 0.0 { 0.0 } else { 1.0 };
    }
    let shape = mean * mean / var;
    let scale = var * mf / mean;
    match Gamma::new(shape, 1.0 / scale) {
        Ok(g) => g.sf(stat).clamp(0.0, 1.0),
        Err(_) => 1.0,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::Rng;

    fn uniforms(l: usize, lo: f64, hi: f64, seed: u64) -> Vec<f64> {
        let mut r = rng::rng(seed);
        (0..l).map(|_| r.random_range(lo..hi)).collect()
    }

    #[test]
    fn identical_columns_dependent() {
        let x = uniforms(200, 0.0, 1.0, 1);
        assert_eq!(hsic_independence(&x, &x, 0.05).unwrap().binary(), Some(0));
    }

    #[test]
    fn calibration_under_independence() {
        let trials = 500;
        let mut rej = 0;
        for s in 0..trials {
            let x = uniforms(200, 0.0, 1.0, 2 * s);
            let y = uniforms(200, 0.0, 1.0, 2 * s + 1);
            rej += (hsic_independence(&x, &y, 0.05).unwrap().binary() == Some(0)) as usize;
        }
        let rate = rej as f64 / trials as f64;
        assert!((rate - 0.05).abs() <= 0.03, "rate {rate}");
    }

    #[test]
    fn detects_uncorrelated_dependence() {
        let seeds = 40;
        let mut hits = 0;
        for s in 0..seeds {
            let x = uniforms(500, -1.0, 1.0, 100 + s);
            let y: Vec<f64> = x.iter().map(|v| v * v).collect();
            hits += (hsic_independence(&x, &y, 0.05).unwrap().binary() == Some(0)) as usize;
        }
        assert!(hits as f64 >= 0.95 * seeds as f64, "{hits}/{seeds}");
    }

    #[test]
    fn errors() {
        let x = uniforms(30, 0.0, 1.0, 3);
        assert!(matches!(hsic_independence(&x, &[1.0; 30], 0.05), Err(Error::DegenerateInput(_))));
        assert!(matches!(hsic_independence(&x[..10], &x[..10], 0.05), Err(Error::DegenerateInput(_))));
        assert!(hsic_independence(&x, &x[..29], 0.05).is_err());
    }

    #[test]
    fn joint_permutation_invariance() {
        let x = uniforms(100, 0.0, 1.0, 4);
        let noise = uniforms(100, 0.0, 1.0, 5);
        let y: Vec<f64> = x.iter().zip(&noise).map(|(a, b)| 0.3 * a + b).collect();
        let p = hsic_independence(&x, &y, 0.05).unwrap().p_value.unwrap();
        let mut idx: Vec<usize> = (0..100).collect();
        idx.shuffle(&mut rng::rng(6));
        let xp: Vec<f64> = idx.iter().map(|&i| x[i]).collect();
        let yp: Vec<f64> = idx.iter().map(|&i| y[i]).collect();
        let pp = hsic_independence(&xp, &yp, 0.05).unwrap().p_value.unwrap();
        assert!((p - pp).abs() < 1e-9, "{p} vs {pp}");
    }

    #[test]
    fn permutation_agrees_with_gamma() {
        let x = uniforms(80, 0.0, 1.0, 7);
        let y = uniforms(80, 0.0, 1.0, 8);
        let g = hsic(&x, &y, &HsicConfig::default()).unwrap();
        let p = hsic(&x, &y, &HsicConfig::permutation(500, 9)).unwrap();
        assert_eq!(g.statistic, p.statistic);
        assert!((g.p_value - p.p_value).abs() < 0.1, "{} vs {}", g.p_value, p.p_value);
        let z: Vec<f64> = x.iter().map(|v| v.sin()).collect();
        assert!(hsic(&x, &z, &HsicConfig::permutation(200, 9)).unwrap().p_value < 0.01);
    }
}
