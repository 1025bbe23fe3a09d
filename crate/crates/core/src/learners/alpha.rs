use crate::error::{Error, Result};
use crate::models::d_separated;
use crate::query::{enumerate_queries, QueryKind};
use crate::rng::derive_seed;
use crate::stattests::{FisherZ, Tester};
use crate::synthgen::{sample, LinearScm};

/// F1 score of predicted dependence (label 0) against true dependence.
/// Defined as 1 when neither side contains a dependence.
pub fn f1_score(predicted: &[u8], truth: &[u8]) -> f64 {
    let (mut tp, mut fp, mut fne) = (0usize, 0usize, 0usize);
    for (&p, &t) in predicted.iter().zip(truth) {
        match (p == 0, t == 0) {
            (true, true) => tp += 1,
            (true, false) => fp += 1,
            (false, true) => fne += 1,
            _ => {}
        }
    }
    if tp + fp + fne == 0 {
        1.0
    } else {
        2.0 * tp as f64 / (2 * tp + fp + fne) as f64
    }
}

/// Confidence level with the best mean F1 over the given models, scoring
/// Fisher-Z decisions on every query with at most one conditioning variable
/// against d-separation in the true graph. Ties go to the smaller level.
pub fn select_alpha(candidates: &[f64], scms: &[LinearScm], l: usize, seed: u64) -> Result<f64> {
    if candidates.is_empty() {
        return Err(Error::InvalidParams("no candidate confidence levels".into()));
    }
    if candidates.len() == 1 {
        return Ok(candidates[0]);
    }
    let mut totals = vec![0.0; candidates.len()];
    for (idx, scm) in scms.iter().enumerate() {
        let n = scm.n();
        let data = sample(scm.clone(), l, derive_seed(seed, &[idx as u64]))?.dataset;
        let dag = scm.dag();
        let mut queries = enumerate_queries(n, QueryKind::CondIndep, 0)?;
        if n >= 3 {
            queries.extend(enumerate_queries(n, QueryKind::CondIndep, 1)?);
        }
        let truth: Vec<u8> = queries.iter().map(|q| d_separated(&dag, q)).collect::<Result<_>>()?;
        let base = FisherZ::new(&data, candidates[0])?;
        for (c, &alpha) in candidates.iter().enumerate() {
            let t = base.with_alpha(alpha)?;
            let pred: Vec<u8> = queries
                .iter()
                .map(|q| Ok(t.test(q)?.binary().unwrap_or(0)))
                .collect::<Result<_>>()?;
            totals[c] += f1_score(&pred, &truth);
        }
    }
    let mut best = 0;
    for c in 1..candidates.len() {
        let better = totals[c] > totals[best];
        let tie_smaller = totals[c] == totals[best] && candidates[c] < candidates[best];
        if better || tie_smaller {
            best = c;
        }
    }
    Ok(candidates[best])
}
