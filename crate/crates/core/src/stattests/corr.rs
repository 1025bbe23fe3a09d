use nalgebra::DMatrix;
use statrs::function::erf::erfc;

use super::{check_alpha, check_non_constant, TestOutcome, Tester};
use crate::dataset::Dataset;
use crate::error::{Error, Result};
use crate::property::{min_eigenvalue, PropertyValue};
use crate::query::{Query, VarId};

/// Pearson correlations of a set of columns. Every entry depends only on its
/// two columns, so any sub-matrix is bit-identical to the matrix computed from
/// just those columns.
#[derive(Debug, Clone)]
pub struct CorrelationMatrix {
    ids: Vec<VarId>,
    samples: usize,
    r: DMatrix<f64>,
}

impl CorrelationMatrix {
    pub fn from_dataset(d: &Dataset) -> Result<Self> {
        let cols: Vec<&[f64]> = (0..d.n_cols()).map(|p| d.column_at(p)).collect();
        Self::from_columns(d.columns().to_vec(), &cols)
    }

    pub fn from_columns(ids: Vec<VarId>, cols: &[&[f64]]) -> Result<Self> {
        let k = cols.len();
        let samples = cols.first().map_or(0, |c| c.len());
        let mut centered = Vec::with_capacity(k);
        let mut norms = Vec::with_capacity(k);
        for (id, c) in ids.iter().zip(cols) {
            check_non_constant(c, &format!("column {id}"))?;
            let m = super::mean(c);
            let v: Vec<f64> = c.iter().map(|x| x - m).collect();
            norms.push(v.iter().map(|x| x * x).sum::<f64>().sqrt());
            centered.push(v);
        }
        let mut r = DMatrix::identity(k, k);
        for i in 0..k {
            for j in i + 1..k {
                let dot: f64 = centered[i].iter().zip(&centered[j]).map(|(a, b)| a * b).sum();
                let v = (dot / (norms[i] * norms[j])).clamp(-1.0, 1.0);
                r[(i, j)] = v;
                r[(j, i)] = v;
            }
        }
        Ok(CorrelationMatrix { ids, samples, r })
    }

    pub fn samples(&self) -> usize {
        self.samples
    }

    pub fn ids(&self) -> &[VarId] {
        &self.ids
    }

    fn pos(&self, id: VarId) -> Result<usize> {
        self.ids.iter().position(|&c| c == id).ok_or(Error::MissingVariable(id))
    }

    pub fn get(&self, a: VarId, b: VarId) -> Result<f64> {
        Ok(self.r[(self.pos(a)?, self.pos(b)?)])
    }

    /// Partial correlation of `(a, b)` given `cond`, read off the inverse of
    /// the correlation sub-matrix: `−P₀₁ / √(P₀₀ P₁₁)`.
    pub fn partial_corr(&self, a: VarId, b: VarId, cond: &[VarId]) -> Result<f64> {
        if cond.is_empty() {
            return self.get(a, b);
        }
        let idx: Vec<usize> = [a, b].iter().chain(cond).map(|&v| self.pos(v)).collect::<Result<_>>()?;
        let k = idx.len();
        let sub = DMatrix::from_fn(k, k, |i, j| self.r[(idx[i], idx[j])]);
        if min_eigenvalue(&sub) < 1e-12 {
            return Err(Error::DegenerateInput("singular correlation sub-matrix".into()));
        }
        let p = sub
            .try_inverse()
            .ok_or_else(|| Error::DegenerateInput("singular correlation sub-matrix".into()))?;
        Ok(-p[(0, 1)] / (p[(0, 0)] * p[(1, 1)]).sqrt())
    }
}

/// Fisher-Z test from a precomputed correlation matrix.
pub fn fisher_z_from_corr(corr: &CorrelationMatrix, q: &Query, alpha: f64) -> Result<TestOutcome> {
    check_alpha(alpha)?;
    let (a, b, cond) = match q.canonical() {
        Query::CondIndep { pair, cond } => (pair.0, pair.1, cond),
        other => return Err(Error::InvalidQuery(format!("Fisher-Z needs a CI query, got {other}"))),
    };
    let l = corr.samples();
    if l <= cond.len() + 3 {
        return Err(Error::DegenerateInput(format!("{l} samples for a conditioning set of {}", cond.len())));
    }
    let r = corr.partial_corr(a, b, &cond)?;
    if !(r.abs() < 1.0) {
        return Err(Error::DegenerateInput(format!("partial correlation {r} on the boundary")));
    }
    let stat = ((l - cond.len() - 3) as f64).sqrt() * r.atanh();
    let p = erfc(stat.abs() / std::f64::consts::SQRT_2).clamp(0.0, 1.0);
    Ok(TestOutcome::decide(p, alpha))
}

/// Fisher-Z test of vanishing partial correlation.
pub fn fisher_z_ci(d: &Dataset, q: &Query, alpha: f64) -> Result<TestOutcome> {
    let members = q.members();
    d.contains_all(&members)?;
    let cols: Vec<&[f64]> = members.iter().map(|&v| d.column(v)).collect::<Result<_>>()?;
    let corr = CorrelationMatrix::from_columns(members, &cols)?;
    fisher_z_from_corr(&corr, q, alpha)
}

/// Fisher-Z tester over a dataset with the correlation matrix computed once.
#[derive(Debug, Clone)]
pub struct FisherZ {
    corr: CorrelationMatrix,
    alpha: f64,
}

impl FisherZ {
    pub fn new(d: &Dataset, alpha: f64) -> Result<Self> {
        check_alpha(alpha)?;
        Ok(FisherZ { corr: CorrelationMatrix::from_dataset(d)?, alpha })
    }

    pub fn with_alpha(&self, alpha: f64) -> Result<Self> {
        check_alpha(alpha)?;
        Ok(FisherZ { corr: self.corr.clone(), alpha })
    }

    pub fn correlations(&self) -> &CorrelationMatrix {
        &self.corr
    }
}

impl Tester for FisherZ {
    fn test(&self, q: &Query) -> Result<TestOutcome> {
        fisher_z_from_corr(&self.corr, q, self.alpha)
    }
}

fn pair_columns<'a>(d: &'a Dataset, q: &Query) -> Result<(VarId, VarId, &'a [f64], &'a [f64])> {
    let (a, b) = match q.canonical() {
        Query::UnorderedPair(a, b) => (a, b),
        other => return Err(Error::InvalidQuery(format!("expected an unordered pair, got {other}"))),
    };
    if d.n_rows() < 3 {
        return Err(Error::DegenerateInput(format!("{} samples, need at least 3", d.n_rows())));
    }
    Ok((a, b, d.column(a)?, d.column(b)?))
}

/// Pearson correlation of the pair.
pub fn corr_estimate(d: &Dataset, q: &Query) -> Result<TestOutcome> {
    let (a, b, x, y) = pair_columns(d, q)?;
    let c = CorrelationMatrix::from_columns(vec![a, b], &[x, y])?;
    Ok(TestOutcome::estimate(PropertyValue::Real(c.get(a, b)?)))
}

/// Sign of the Pearson correlation.
pub fn sign_estimate(d: &Dataset, q: &Query) -> Result<TestOutcome> {
    let (a, b, x, y) = pair_columns(d, q)?;
    let r = CorrelationMatrix::from_columns(vec![a, b], &[x, y])?.get(a, b)?;
    if r.abs() <= 1e-12 {
        return Err(Error::ZeroCorrelation(a, b));
    }
    Ok(TestOutcome::estimate(PropertyValue::sign_of(r)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng;
    use approx::assert_abs_diff_eq;
    use rand::Rng;
    use rand_distr::StandardNormal;

    fn normal_columns(k: usize, l: usize, seed: u64) -> Vec<Vec<f64>> {
        let mut r = rng::rng(seed);
        (0..k).map(|_| (0..l).map(|_| r.sample(StandardNormal)).collect()).collect()
    }

    /// Two columns of length `l` with sample correlation exactly `rho`
    /// (up to rounding), built by Gram-Schmidt.
    fn with_sample_corr(l: usize, rho: f64, seed: u64) -> Dataset {
        let cols = normal_columns(2, l, seed);
        let center = |v: &[f64]| {
            let m = v.iter().sum::<f64>() / v.len() as f64;
            v.iter().map(|x| x - m).collect::<Vec<_>>()
        };
        let unit = |v: Vec<f64>| {
            let n = v.iter().map(|x| x * x).sum::<f64>().sqrt();
            v.into_iter().map(|x| x / n).collect::<Vec<_>>()
        };
        let x = unit(center(&cols[0]));
        let y0 = center(&cols[1]);
        let proj: f64 = x.iter().zip(&y0).map(|(a, b)| a * b).sum();
        let e = unit(y0.iter().zip(&x).map(|(b, a)| b - proj * a).collect());
        let y: Vec<f64> = x.iter().zip(&e).map(|(a, b)| rho * a + (1.0 - rho * rho).sqrt() * b).collect();
        Dataset::from_columns(vec![0, 1], vec![x, y]).unwrap()
    }

    #[test]
    fn fisher_z_hand_value() {
        let d = with_sample_corr(100, 0.5, 1);
        let q = Query::cond_indep(0, 1, vec![]).unwrap();
        let out = fisher_z_ci(&d, &q, 0.05).unwrap();
        // √97 · atanh(0.5) = 5.4101; two-sided p = erfc(5.4101/√2)
        let stat = 97f64.sqrt() * 0.5f64.atanh();
        assert_abs_diff_eq!(stat, 5.41, epsilon = 0.01);
        let p = out.p_value.unwrap();
        assert_abs_diff_eq!(p, erfc(stat / 2f64.sqrt()), epsilon = 1e-12);
        assert!(p > 5e-8 && p < 7e-8, "p = {p}");
        assert_eq!(out.binary(), Some(0));
    }

    #[test]
    fn fisher_z_degenerate() {
        let cols = normal_columns(1, 50, 2);
        let d = Dataset::from_columns(vec![0, 1], vec![cols[0].clone(), cols[0].clone()]).unwrap();
        let q = Query::cond_indep(0, 1, vec![]).unwrap();
        assert!(matches!(fisher_z_ci(&d, &q, 0.05), Err(Error::DegenerateInput(_))));
        let d = Dataset::from_columns(vec![0, 1], vec![cols[0].clone(), vec![1.0; 50]]).unwrap();
        assert!(matches!(fisher_z_ci(&d, &q, 0.05), Err(Error::DegenerateInput(_))));
        let mut c = normal_columns(3, 50, 3);
        c.push(c[0].clone());
        let d = Dataset::from_columns(vec![0, 1, 2, 3], c).unwrap();
        let q = Query::cond_indep(1, 2, vec![0]).unwrap();
        assert!(fisher_z_ci(&d, &q, 0.05).is_ok());
        let q = Query::cond_indep(0, 1, vec![3]).unwrap();
        assert!(matches!(fisher_z_ci(&d, &q, 0.05), Err(Error::DegenerateInput(_))));
    }

    #[test]
    fn fisher_z_symmetries_bit_exact() {
        let d = Dataset::from_columns(vec![0, 1, 2, 3], normal_columns(4, 200, 4)).unwrap();
        let base = fisher_z_ci(&d, &Query::cond_indep(0, 3, vec![1, 2]).unwrap(), 0.05).unwrap();
        for q in [
            Query::CondIndep { pair: (3, 0), cond: vec![2, 1] },
            Query::CondIndep { pair: (0, 3), cond: vec![2, 1] },
        ] {
            assert_eq!(fisher_z_ci(&d, &q, 0.05).unwrap(), base);
        }
        let cached = FisherZ::new(&d, 0.05).unwrap();
        assert_eq!(cached.test(&Query::CondIndep { pair: (3, 0), cond: vec![2, 1] }).unwrap(), base);
    }

    #[test]
    fn fisher_z_calibration() {
        let trials = 2000;
        let mut rejections = 0;
        for s in 0..trials {
            let d = Dataset::from_columns(vec![0, 1], normal_columns(2, 500, 1000 + s)).unwrap();
            let out = fisher_z_ci(&d, &Query::cond_indep(0, 1, vec![]).unwrap(), 0.05).unwrap();
            rejections += (out.binary() == Some(0)) as usize;
        }
        let rate = rejections as f64 / trials as f64;
        assert!((rate - 0.05).abs() <= 0.02, "rate {rate}");
    }

    #[test]
    fn correlation_estimates() {
        let x = normal_columns(1, 100, 5).remove(0);
        let d = Dataset::from_columns(vec![0, 1, 2], vec![
            x.clone(),
            x.iter().map(|v| 2.0 * v).collect(),
            x.iter().map(|v| -v).collect(),
        ])
        .unwrap();
        let up = |a, b| Query::unordered_pair(a, b).unwrap();
        assert_abs_diff_eq!(corr_estimate(&d, &up(0, 1)).unwrap().value.as_real().unwrap(), 1.0, epsilon = 1e-12);
        assert_abs_diff_eq!(corr_estimate(&d, &up(0, 2)).unwrap().value.as_real().unwrap(), -1.0, epsilon = 1e-12);
        assert_eq!(sign_estimate(&d, &up(0, 1)).unwrap().value, PropertyValue::Sign(1));
        assert_eq!(sign_estimate(&d, &up(2, 0)).unwrap().value, PropertyValue::Sign(-1));
        assert!(corr_estimate(&d, &Query::ordered_pair(0, 1).unwrap()).is_err());

        // ρ = 0.3 bivariate Gaussian
        let c = normal_columns(2, 100_000, 6);
        let y: Vec<f64> = c[0].iter().zip(&c[1]).map(|(a, b)| 0.3 * a + (1.0 - 0.09f64).sqrt() * b).collect();
        let d = Dataset::from_columns(vec![0, 1], vec![c[0].clone(), y]).unwrap();
        let r = corr_estimate(&d, &up(0, 1)).unwrap().value.as_real().unwrap();
        assert!((r - 0.3).abs() < 0.02);
        assert_eq!(sign_estimate(&d, &up(0, 1)).unwrap().value, PropertyValue::Sign(1));
    }

    #[test]
    fn correlation_affine_invariance() {
        let c = normal_columns(2, 300, 7);
        let y: Vec<f64> = c[0].iter().zip(&c[1]).map(|(a, b)| a + b).collect();
        let d1 = Dataset::from_columns(vec![0, 1], vec![c[0].clone(), y.clone()]).unwrap();
        let d2 = Dataset::from_columns(vec![0, 1], vec![
            c[0].iter().map(|v| 3.0 * v + 7.0).collect(),
            y.iter().map(|v| 0.5 * v - 2.0).collect(),
        ])
        .unwrap();
        let d3 = Dataset::from_columns(vec![0, 1], vec![c[0].clone(), y.iter().map(|v| -v).collect()]).unwrap();
        let q = Query::unordered_pair(0, 1).unwrap();
        let r1 = corr_estimate(&d1, &q).unwrap().value.as_real().unwrap();
        let r2 = corr_estimate(&d2, &q).unwrap().value.as_real().unwrap();
        assert_abs_diff_eq!(r1, r2, epsilon = 1e-12);
        assert_eq!(sign_estimate(&d3, &q).unwrap().value, PropertyValue::Sign(-1));
    }
}
