//! VC-dimension upper bounds per model class, binary and real-valued
//! generalization gaps, and the test-budget planner.

use std::collections::HashSet;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::models::{enumerate_dags, is_polytree, q_ci_dag, q_dirpath, Dag, PathModel};
use crate::query::{enumerate_queries, Query, QueryKind};

/// Default constant `c` in the `c·n` bound for real-valued path correlations.
pub const DEFAULT_PATH_CORR_CONSTANT: f64 = 4.0;

/// Largest `n` for which exhaustive enumeration is attempted.
pub const MAX_EXHAUSTIVE_N: usize = 4;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ModelClass {
    /// CI predictions of arbitrary DAGs.
    AllDags,
    /// CI predictions of polytrees.
    Polytrees,
    /// Correlation signs along a collider-free path.
    PathSign,
    /// Real-valued correlations along a collider-free path.
    PathCorr,
    /// Directed-path existence in a DAG.
    Directionality,
}

impl ModelClass {
    pub const ALL: [ModelClass; 5] = [
        ModelClass::AllDags,
        ModelClass::Polytrees,
        ModelClass::PathSign,
        ModelClass::PathCorr,
        ModelClass::Directionality,
    ];

    pub fn name(self) -> &'static str {
        match self {
            ModelClass::AllDags => "alldags",
            ModelClass::Polytrees => "polytrees",
            ModelClass::PathSign => "pathsign",
            ModelClass::PathCorr => "pathcorr",
            ModelClass::Directionality => "directionality",
        }
    }
}

impl FromStr for ModelClass {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        ModelClass::ALL
            .into_iter()
            .find(|c| c.name() == s.to_ascii_lowercase().replace(['-', '_'], ""))
            .ok_or_else(|| Error::InvalidParams(format!("unknown model class {s:?}")))
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BoundReport {
    pub class: ModelClass,
    pub n: usize,
    /// VC-dimension upper bound.
    pub h: f64,
    pub k: u64,
    pub eta: f64,
    pub empirical_risk: f64,
    pub gap: f64,
    /// `empirical_risk + gap`, holding with probability `1 − eta`.
    pub bound: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub note: Option<String>,
}

/// VC upper bound `h` with the default path-correlation constant.
pub fn vc_upper_bound(class: ModelClass, n: usize) -> Result<f64> {
    vc_upper_bound_with(class, n, DEFAULT_PATH_CORR_CONSTANT)
}

pub fn vc_upper_bound_with(class: ModelClass, n: usize, path_corr_constant: f64) -> Result<f64> {
    if n < 2 {
        return Err(Error::InvalidParams(format!("n must be at least 2, got {n}")));
    }
    let nf = n as f64;
    Ok(match class {
        ModelClass::AllDags => nf * nf.log2() + nf * (nf - 1.0) / 2.0,
        ModelClass::Polytrees => nf * (nf.log2() + 1.0),
        ModelClass::PathSign => nf,
        ModelClass::PathCorr => path_corr_constant * nf,
        ModelClass::Directionality => nf - 1.0,
    })
}

fn check_common(h: f64, k: u64, eta: f64) -> Result<()> {
    if k == 0 || !(h > 0.0) || !(eta > 0.0 && eta < 1.0) {
        return Err(Error::InvalidParams(format!("need k >= 1, h > 0, 0 < eta < 1 (h={h}, k={k}, eta={eta})")));
    }
    Ok(())
}

/// Binary-loss generalization gap `2·√((h(ln(2k/h)+1) − ln(η/9))/k)`, clamped
/// to `[0, 1]`; the trivial gap 1 when `2k/h ≤ 1`.
pub fn gap_binary(h: f64, k: u64, eta: f64) -> Result<f64> {
    check_common(h, k, eta)?;
    let kf = k as f64;
    if 2.0 * kf / h <= 1.0 {
        return Ok(1.0);
    }
    let inner = (h * ((2.0 * kf / h).ln() + 1.0) - (eta / 9.0).ln()) / kf;
    Ok((2.0 * inner.max(0.0).sqrt()).min(1.0))
}

/// Gap for `[a, b]`-valued losses, `(b−a)·√((h(ln(k/h)+1) − ln(η/4))/k)`,
/// clamped to `[0, b−a]`; trivial when `k/h ≤ 1`.
pub fn gap_real(h: f64, k: u64, eta: f64, a: f64, b: f64) -> Result<f64> {
    check_common(h, k, eta)?;
    if !(b > a) {
        return Err(Error::InvalidParams(format!("need b > a, got [{a}, {b}]")));
    }
    let (kf, range) = (k as f64, b - a);
    if kf / h <= 1.0 {
        return Ok(range);
    }
    let inner = (h * ((kf / h).ln() + 1.0) - (eta / 4.0).ln()) / kf;
    Ok((range * inner.max(0.0).sqrt()).min(range))
}

/// Bound report for a class; `PathCorr` uses the real-valued gap on `[-1, 1]`.
pub fn bound_report(class: ModelClass, n: usize, k: u64, eta: f64, empirical_risk: f64) -> Result<BoundReport> {
    let h = vc_upper_bound(class, n)?;
    let (gap, note) = match class {
        ModelClass::PathCorr => (
            gap_real(h, k, eta, -1.0, 1.0)?,
            Some(format!("h = {DEFAULT_PATH_CORR_CONSTANT}·n, up to the configured constant")),
        ),
        _ => (gap_binary(h, k, eta)?, None),
    };
    Ok(BoundReport { class, n, h, k, eta, empirical_risk, gap, bound: empirical_risk + gap, note })
}

/// Smallest `k` with `gap_binary(h, k, eta) ≤ eps`, where `h` is the class bound.
pub fn min_training_sets(class: ModelClass, n: usize, eps: f64, eta: f64) -> Result<u64> {
    if !(eps > 0.0 && eps < 1.0) {
        return Err(Error::InvalidParams(format!("eps must lie in (0,1), got {eps}")));
    }
    let h = vc_upper_bound(class, n)?;
    let ok = |k: u64| gap_binary(h, k, eta).map(|g| g <= eps);
    let mut hi = 1u64;
    while !ok(hi)? {
        hi = hi.checked_mul(2).ok_or_else(|| Error::InvalidParams("k overflow".into()))?;
    }
    let mut lo = hi / 2; // ok(lo) is false or lo == 0
    while lo + 1 < hi {
        let mid = lo + (hi - lo) / 2;
        if ok(mid)? {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    Ok(hi)
}

fn binomial(n: u64, k: u64) -> Option<u64> {
    if k > n {
        return Some(0);
    }
    let k = k.min(n - k);
    let mut acc: u128 = 1;
    for i in 0..k {
        acc = acc * (n - i) as u128 / (i + 1) as u128;
        if acc > u64::MAX as u128 {
            return None;
        }
    }
    Some(acc as u64)
}

/// Closed-form size of the query universe (see [`enumerate_queries`] for the
/// meaning of `size`).
pub fn count_queries(n: usize, kind: QueryKind, size: usize) -> Result<u64> {
    if n < 2 {
        return Err(Error::InvalidSize(format!("need n >= 2, got {n}")));
    }
    let (n64, s) = (n as u64, size as u64);
    let overflow = || Error::InvalidSize("count overflows u64".into());
    let pairs = n64 * (n64 - 1) / 2;
    match kind {
        QueryKind::CondIndep => {
            if size + 2 > n {
                return Err(Error::InvalidSize(format!("conditioning set of {size} with n={n}")));
            }
            pairs.checked_mul(binomial(n64 - 2, s).ok_or_else(overflow)?).ok_or_else(overflow)
        }
        QueryKind::OrderedPair => Ok(2 * pairs),
        QueryKind::UnorderedPair => Ok(pairs),
        QueryKind::OrderedTuple => {
            if size == 0 || size > n {
                return Err(Error::InvalidSize(format!("tuple length {size} with n={n}")));
            }
            (n64 - s + 1..=n64).try_fold(1u64, |acc, f| acc.checked_mul(f)).ok_or_else(overflow)
        }
    }
}

/// Required test budget next to the number of possible CI tests with one
/// conditioning variable.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Plan {
    pub class: ModelClass,
    pub n: usize,
    pub eps: f64,
    pub eta: f64,
    pub h: f64,
    pub min_k: u64,
    pub possible_tests: u64,
    pub fraction: f64,
}

pub fn plan(class: ModelClass, n: usize, eps: f64, eta: f64) -> Result<Plan> {
    let min_k = min_training_sets(class, n, eps, eta)?;
    let possible_tests = count_queries(n, QueryKind::CondIndep, 1)?;
    Ok(Plan {
        class,
        n,
        eps,
        eta,
        h: vc_upper_bound(class, n)?,
        min_k,
        possible_tests,
        fraction: min_k as f64 / possible_tests as f64,
    })
}

/// Query universe each class predicts on, for exhaustive checks.
fn class_universe(class: ModelClass, n: usize) -> Result<Vec<Query>> {
    Ok(match class {
        ModelClass::AllDags | ModelClass::Polytrees => {
            let mut qs = Vec::new();
            for s in 0..=n - 2 {
                qs.extend(enumerate_queries(n, QueryKind::CondIndep, s)?);
            }
            qs
        }
        ModelClass::PathSign | ModelClass::PathCorr => enumerate_queries(n, QueryKind::UnorderedPair, 0)?,
        ModelClass::Directionality => enumerate_queries(n, QueryKind::OrderedPair, 0)?,
    })
}

fn permutations(n: usize) -> Vec<Vec<usize>> {
    let mut out = vec![vec![]];
    for _ in 0..n {
        out = out
            .into_iter()
            .flat_map(|p: Vec<usize>| {
                let free: Vec<usize> = (0..n).filter(|v| !p.contains(v)).collect();
                free.into_iter().map(move |v| {
                    let mut q = p.clone();
                    q.push(v);
                    q
                })
            })
            .collect();
    }
    out
}

/// Every binary function the class realizes on its full query universe, one
/// bit vector per distinct function.
pub fn realized_functions(class: ModelClass, n: usize) -> Result<(Vec<Query>, Vec<Vec<u8>>)> {
    if n > MAX_EXHAUSTIVE_N {
        return Err(Error::NTooLarge { n, max: MAX_EXHAUSTIVE_N });
    }
    if n < 2 {
        return Err(Error::InvalidParams(format!("n must be at least 2, got {n}")));
    }
    let universe = class_universe(class, n)?;
    let mut set: HashSet<Vec<u8>> = HashSet::new();
    let eval_dag = |g: &Dag, f: fn(&Dag, &Query) -> Result<u8>| -> Result<Vec<u8>> {
        universe.iter().map(|q| f(g, q)).collect()
    };
    match class {
        ModelClass::AllDags => {
            for g in enumerate_dags(n) {
                set.insert(eval_dag(&g, q_ci_dag)?);
            }
        }
        ModelClass::Polytrees => {
            for g in enumerate_dags(n).into_iter().filter(is_polytree) {
                set.insert(eval_dag(&g, q_ci_dag)?);
            }
        }
        ModelClass::Directionality => {
            for g in enumerate_dags(n) {
                set.insert(eval_dag(&g, q_dirpath)?);
            }
        }
        ModelClass::PathSign => {
            for order in permutations(n) {
                for code in 0..(1u32 << (n - 1)) {
                    let r = (0..n - 1).map(|i| if code >> i & 1 == 1 { -0.5 } else { 0.5 }).collect();
                    let m = PathModel::new(order.clone(), r)?;
                    let f = universe
                        .iter()
                        .map(|q| crate::models::path_sign(&m, q).map(|s| (s > 0) as u8))
                        .collect::<Result<Vec<u8>>>()?;
                    set.insert(f);
                }
            }
        }
        ModelClass::PathCorr => {
            return Err(Error::Unsupported(
                "path correlations are real-valued; no finite function count exists".into(),
            ))
        }
    }
    let mut fs: Vec<Vec<u8>> = set.into_iter().collect();
    fs.sort();
    Ok((universe, fs))
}

/// Number of distinct predictor functions the class realizes on its full
/// query universe (`n ≤ 4`). Its binary logarithm bounds the VC dimension.
pub fn brute_force_vc_check(class: ModelClass, n: usize) -> Result<u64> {
    Ok(realized_functions(class, n)?.1.len() as u64)
}

/// Exact VC dimension of a finite function family by searching for the
/// largest shattered set of query positions. Shattered sets are closed under
/// subsets, so candidates of size `d+1` are grown from shattered sets of size `d`.
pub fn shattering_dimension(functions: &[Vec<u8>]) -> usize {
    let Some(m) = functions.first().map(Vec::len) else { return 0 };
    let shattered = |set: &[usize]| {
        let patterns: HashSet<u64> = functions
            .iter()
            .map(|f| set.iter().enumerate().fold(0u64, |acc, (b, &i)| acc | (f[i] as u64) << b))
            .collect();
        patterns.len() == 1usize << set.len()
    };
    let mut level: Vec<Vec<usize>> = vec![vec![]];
    let mut dim = 0;
    while !level.is_empty() && (1usize << (dim + 1)) <= functions.len() {
        let mut next: HashSet<Vec<usize>> = HashSet::new();
        for s in &level {
            let start = s.last().map_or(0, |&x| x + 1);
            for i in start..m {
                let mut cand = s.clone();
                cand.push(i);
                if shattered(&cand) {
                    next.insert(cand);
                }
            }
        }
        if next.is_empty() {
            break;
        }
        dim += 1;
        level = next.into_iter().collect();
    }
    dim
}

/// For every spanning-tree skeleton on `n ≤ 4` nodes, the number of Markov
/// equivalence classes of its orientations.
pub fn polytree_classes_per_skeleton(n: usize) -> Result<Vec<(Vec<(usize, usize)>, u64)>> {
    if n > MAX_EXHAUSTIVE_N {
        return Err(Error::NTooLarge { n, max: MAX_EXHAUSTIVE_N });
    }
    use std::collections::BTreeMap;
    let mut by_skeleton: BTreeMap<Vec<(usize, usize)>, HashSet<Vec<(usize, usize, usize)>>> = BTreeMap::new();
    for g in enumerate_dags(n).into_iter().filter(|g| g.n_edges() + 1 == n && is_polytree(g)) {
        let skel: Vec<_> = g.skeleton().into_iter().collect();
        by_skeleton.entry(skel).or_default().insert(g.v_structures().into_iter().collect());
    }
    Ok(by_skeleton.into_iter().map(|(s, classes)| (s, classes.len() as u64)).collect())
}
