//! End-to-end experiments comparing empirical and expected risk of learned
//! models, with generalization-bound overlays.

use std::collections::{BTreeMap, HashMap};
use std::io::Write;

use serde::{Deserialize, Serialize};

use crate::bounds::{gap_binary, vc_upper_bound, ModelClass};
use crate::error::{Error, Result};
use crate::learners::{pc_fit_with, polytree_from_labels, LabeledQuery};
use crate::models::{q_anm_polytree, q_ci_dag, random_dag_from_cpdag, Polytree};
use crate::par::{try_map_range, try_map_slice, Execution};
use crate::property::PropertyValue;
use crate::query::{enumerate_queries, sample_queries, Query, QueryKind};
use crate::risk::{binary_error, empirical_error};
use crate::rng::derive_seed;
use crate::stattests::{AnmTester, DSeparationOracle, EdgeOracle, FisherZ, Tester};
use crate::synthgen::{gen_gam_scm, gen_linear_scm, sample};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ExperimentKind {
    Ci,
    Anm,
}

impl ExperimentKind {
    pub fn name(self) -> &'static str {
        match self {
            ExperimentKind::Ci => "ci",
            ExperimentKind::Anm => "anm",
        }
    }

    /// Factor by which plots shrink the bound for display. Reports keep the
    /// unscaled bound.
    pub fn rescale_factor(self) -> f64 {
        match self {
            ExperimentKind::Ci => 0.6,
            ExperimentKind::Anm => 0.2,
        }
    }

    pub fn default_bound_class(self) -> ModelClass {
        match self {
            ExperimentKind::Ci => ModelClass::AllDags,
            ExperimentKind::Anm => ModelClass::Polytrees,
        }
    }
}

/// Which CI queries count as the training set.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CiQueryMode {
    /// The queries PC executed.
    #[default]
    Executed,
    /// A fixed-size uniform sample of the query universe.
    Sampled(usize),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct ExperimentConfig {
    pub experiment: ExperimentKind,
    pub n: usize,
    pub l: usize,
    pub alpha: f64,
    /// Training-set sizes (ANM only).
    pub k_values: Vec<usize>,
    /// Largest conditioning set (CI only).
    pub max_cond: usize,
    pub datasets: usize,
    /// Training-set redraws per dataset and `k` (ANM only).
    pub repetitions: usize,
    pub seed: u64,
    pub expected_degree: f64,
    /// Confidence parameter of the bound overlay.
    pub eta: f64,
    pub bound_class: Option<ModelClass>,
    pub query_mode: CiQueryMode,
    /// Replace statistical tests by the ground truth.
    pub oracle: bool,
    pub execution: Execution,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        ExperimentConfig {
            experiment: ExperimentKind::Ci,
            n: 10,
            l: 10_000,
            alpha: 0.001,
            k_values: vec![],
            max_cond: 1,
            datasets: 20,
            repetitions: 20,
            seed: 0,
            expected_degree: 1.5,
            eta: 0.1,
            bound_class: None,
            query_mode: CiQueryMode::Executed,
            oracle: false,
            execution: Execution::default(),
        }
    }
}

impl ExperimentConfig {
    pub fn ci(n: usize, l: usize, alpha: f64, datasets: usize, seed: u64) -> Self {
        ExperimentConfig { experiment: ExperimentKind::Ci, n, l, alpha, datasets, seed, ..Default::default() }
    }

    pub fn anm(n: usize, l: usize, alpha: f64, k_values: Vec<usize>, datasets: usize, repetitions: usize, seed: u64) -> Self {
        ExperimentConfig {
            experiment: ExperimentKind::Anm,
            n,
            l,
            alpha,
            k_values,
            datasets,
            repetitions,
            seed,
            ..Default::default()
        }
    }

    pub fn bound_class(&self) -> ModelClass {
        self.bound_class.unwrap_or(self.experiment.default_bound_class())
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |m: String| Err(Error::InvalidParams(m));
        if self.n < 2 {
            return bad(format!("n must be at least 2, got {}", self.n));
        }
        if self.l == 0 || self.datasets == 0 {
            return bad("l and datasets must be positive".into());
        }
        if !(self.alpha > 0.0 && self.alpha < 1.0) || !(self.eta > 0.0 && self.eta < 1.0) {
            return bad(format!("alpha and eta must lie in (0,1), got {} and {}", self.alpha, self.eta));
        }
        if self.experiment == ExperimentKind::Anm {
            if self.repetitions == 0 || self.k_values.is_empty() {
                return bad("ANM experiments need repetitions >= 1 and at least one k".into());
            }
            let universe = self.n * (self.n - 1);
            if let Some(&k) = self.k_values.iter().find(|&&k| k == 0 || k > universe) {
                return Err(Error::KTooLarge { k, universe });
            }
        }
        Ok(())
    }
}

/// One (dataset, training set) evaluation.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RiskRecord {
    pub experiment: ExperimentKind,
    pub n: usize,
    pub l: usize,
    pub alpha: f64,
    pub k: usize,
    pub rep: usize,
    pub empirical: f64,
    pub expected: f64,
    pub gap: f64,
    pub bound_unscaled: f64,
    /// Seed of the generating dataset.
    pub seed: u64,
}

/// Error of `model` over an exhaustive query universe, against `tester`.
pub fn expected_risk<P, T>(model: P, queries: &[Query], tester: &T) -> Result<f64>
where
    P: Fn(&Query) -> Result<PropertyValue> + Sync + Send,
    T: Tester + ?Sized,
{
    expected_risk_with(model, queries, tester, Execution::default())
}

pub fn expected_risk_with<P, T>(model: P, queries: &[Query], tester: &T, exec: Execution) -> Result<f64>
where
    P: Fn(&Query) -> Result<PropertyValue> + Sync + Send,
    T: Tester + ?Sized,
{
    let pairs = try_map_slice(exec, queries, |q| Ok::<_, Error>((model(q)?, tester.test(q)?.value)))?;
    let (pred, truth): (Vec<_>, Vec<_>) = pairs.into_iter().unzip();
    empirical_error(&pred, &truth)
}

fn record(cfg: &ExperimentConfig, k: usize, rep: usize, empirical: f64, expected: f64, seed: u64) -> Result<RiskRecord> {
    let h = vc_upper_bound(cfg.bound_class(), cfg.n)?;
    Ok(RiskRecord {
        experiment: cfg.experiment,
        n: cfg.n,
        l: cfg.l,
        alpha: cfg.alpha,
        k,
        rep,
        empirical,
        expected,
        gap: (empirical - expected).abs(),
        bound_unscaled: gap_binary(h, k as u64, cfg.eta)?,
        seed,
    })
}

/// CI experiment: per dataset, fit PC on a linear-Gaussian sample, extend the
/// CPDAG to a random DAG, and compare its error on the training queries with
/// its error on every query with a conditioning set of size at most
/// `max_cond`.
pub fn run_ci_experiment(cfg: &ExperimentConfig) -> Result<Vec<RiskRecord>> {
    if cfg.experiment != ExperimentKind::Ci {
        return Err(Error::InvalidParams("not a CI experiment config".into()));
    }
    cfg.validate()?;
    let n = cfg.n;
    let mut universe = Vec::new();
    for s in 0..=cfg.max_cond.min(n - 2) {
        universe.extend(enumerate_queries(n, QueryKind::CondIndep, s)?);
    }
    try_map_range(cfg.execution, cfg.datasets, |idx| {
        let seed = derive_seed(cfg.seed, &[idx as u64]);
        let scm = gen_linear_scm(n, cfg.expected_degree, seed)?;
        let truth = scm.dag();
        let tester: Box<dyn Tester> = if cfg.oracle {
            Box::new(DSeparationOracle(truth))
        } else {
            let data = sample(scm, cfg.l, derive_seed(seed, &[1]))?.dataset;
            Box::new(FisherZ::new(&data, cfg.alpha)?)
        };
        let (cpdag, executed) = pc_fit_with(n, tester.as_ref(), cfg.max_cond)?;
        let dag = random_dag_from_cpdag(&cpdag, derive_seed(seed, &[2]));
        let training: Vec<LabeledQuery> = match cfg.query_mode {
            CiQueryMode::Executed => executed,
            CiQueryMode::Sampled(k) => sample_queries(&universe, k, derive_seed(seed, &[3]))?
                .into_iter()
                .map(|q| Ok(LabeledQuery { outcome: tester.test(&q)?, query: q }))
                .collect::<Result<_>>()?,
        };
        let model = |q: &Query| Ok(PropertyValue::Binary(q_ci_dag(&dag, q)?));
        let pred: Vec<PropertyValue> = training.iter().map(|t| model(&t.query)).collect::<Result<_>>()?;
        let labels: Vec<PropertyValue> = training.iter().map(|t| t.outcome.value.clone()).collect();
        let empirical = if training.is_empty() { 0.0 } else { empirical_error(&pred, &labels)? };
        let expected = expected_risk_with(model, &universe, tester.as_ref(), Execution::Sequential)?;
        record(cfg, training.len(), idx, empirical, expected, seed)
    })
}

/// ANM experiment: per dataset, test every ordered pair once; per `k` and
/// repetition, fit a polytree to `k` sampled pairs and compare its error on
/// them with its error on all pairs.
pub fn run_anm_experiment(cfg: &ExperimentConfig) -> Result<Vec<RiskRecord>> {
    if cfg.experiment != ExperimentKind::Anm {
        return Err(Error::InvalidParams("not an ANM experiment config".into()));
    }
    cfg.validate()?;
    let n = cfg.n;
    let universe = enumerate_queries(n, QueryKind::OrderedPair, 0)?;
    let mut records = Vec::new();
    for idx in 0..cfg.datasets {
        let seed = derive_seed(cfg.seed, &[idx as u64]);
        let scm = gen_gam_scm(n, cfg.expected_degree, seed)?;
        let outcomes = if cfg.oracle {
            let oracle = EdgeOracle(Polytree::new(scm.dag().clone())?);
            try_map_slice(Execution::Sequential, &universe, |q| oracle.test(q))?
        } else {
            let data = sample(scm, cfg.l, derive_seed(seed, &[1]))?.dataset;
            let tester = AnmTester::new(&data, cfg.alpha);
            try_map_slice(cfg.execution, &universe, |q| tester.test(q))?
        };
        let table: Vec<LabeledQuery> =
            universe.iter().cloned().zip(outcomes).map(|(query, outcome)| LabeledQuery { query, outcome }).collect();
        records.extend(anm_repetitions(cfg, &table, seed)?);
    }
    Ok(records)
}

/// Training-set redraws for one dataset, given its full outcome table in
/// universe order.
fn anm_repetitions(cfg: &ExperimentConfig, table: &[LabeledQuery], seed: u64) -> Result<Vec<RiskRecord>> {
    let universe: Vec<Query> = table.iter().map(|t| t.query.clone()).collect();
    let index: HashMap<&Query, usize> = universe.iter().enumerate().map(|(i, q)| (q, i)).collect();
    let labels: Vec<u8> = table.iter().map(|t| t.outcome.binary().unwrap_or(0)).collect();
    let jobs: Vec<(usize, usize)> =
        cfg.k_values.iter().flat_map(|&k| (0..cfg.repetitions).map(move |rep| (k, rep))).collect();
    try_map_slice(cfg.execution, &jobs, |&(k, rep)| {
        let chosen: Vec<usize> = sample_queries(&universe, k, derive_seed(seed, &[2, k as u64, rep as u64]))?
            .iter()
            .map(|q| index[q])
            .collect();
        let training: Vec<LabeledQuery> = chosen.iter().map(|&i| table[i].clone()).collect();
        let tree = polytree_from_labels(cfg.n, &training)?;
        let pred: Vec<u8> = universe.iter().map(|q| q_anm_polytree(&tree, q)).collect::<Result<_>>()?;
        let pred_train: Vec<u8> = chosen.iter().map(|&i| pred[i]).collect();
        let labels_train: Vec<u8> = chosen.iter().map(|&i| labels[i]).collect();
        let empirical = binary_error(&pred_train, &labels_train)?;
        let expected = binary_error(&pred, &labels)?;
        record(cfg, k, rep, empirical, expected, seed)
    })
}

pub fn run_experiment(cfg: &ExperimentConfig) -> Result<Vec<RiskRecord>> {
    match cfg.experiment {
        ExperimentKind::Ci => run_ci_experiment(cfg),
        ExperimentKind::Anm => run_anm_experiment(cfg),
    }
}

/// Linearly interpolated empirical quantile, `q` in `[0, 1]`.
pub fn quantile(values: &[f64], q: f64) -> f64 {
    if values.is_empty() {
        return f64::NAN;
    }
    let mut v = values.to_vec();
    v.sort_by(f64::total_cmp);
    let h = (v.len() - 1) as f64 * q.clamp(0.0, 1.0);
    let lo = h.floor() as usize;
    let hi = h.ceil() as usize;
    v[lo] + (h - lo as f64) * (v[hi] - v[lo])
}

/// Gap statistics for one `(n, k)` group (for CI runs `k` varies per
/// dataset, so groups are keyed by `n` alone and `k` is the mean).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GapSummary {
    pub experiment: ExperimentKind,
    pub n: usize,
    pub k: f64,
    pub count: usize,
    pub mean_gap: f64,
    pub q90_gap: f64,
    pub max_gap: f64,
    pub mean_bound: f64,
    pub min_bound: f64,
}

pub fn summarize(records: &[RiskRecord]) -> Vec<GapSummary> {
    let mut groups: BTreeMap<(u8, usize, usize), Vec<&RiskRecord>> = BTreeMap::new();
    for r in records {
        let k = if r.experiment == ExperimentKind::Anm { r.k } else { 0 };
        groups.entry((r.experiment as u8, r.n, k)).or_default().push(r);
    }
    groups
        .into_values()
        .map(|g| {
            let gaps: Vec<f64> = g.iter().map(|r| r.gap).collect();
            let c = g.len() as f64;
            GapSummary {
                experiment: g[0].experiment,
                n: g[0].n,
                k: g.iter().map(|r| r.k as f64).sum::<f64>() / c,
                count: g.len(),
                mean_gap: gaps.iter().sum::<f64>() / c,
                q90_gap: quantile(&gaps, 0.9),
                max_gap: gaps.iter().copied().fold(0.0, f64::max),
                mean_bound: g.iter().map(|r| r.bound_unscaled).sum::<f64>() / c,
                min_bound: g.iter().map(|r| r.bound_unscaled).fold(f64::INFINITY, f64::min),
            }
        })
        .collect()
}

/// Sidecar metadata for a report.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReportMeta {
    pub config: ExperimentConfig,
    pub bound_class: ModelClass,
    pub vc_dimension: f64,
    pub rescale_factor: f64,
    pub summaries: Vec<GapSummary>,
}

pub fn report_meta(cfg: &ExperimentConfig, records: &[RiskRecord]) -> Result<ReportMeta> {
    Ok(ReportMeta {
        config: cfg.clone(),
        bound_class: cfg.bound_class(),
        vc_dimension: vc_upper_bound(cfg.bound_class(), cfg.n)?,
        rescale_factor: cfg.experiment.rescale_factor(),
        summaries: summarize(records),
    })
}

/// CSV with columns `experiment, n, l, alpha, k, rep, empirical, expected,
/// gap, bound_unscaled, seed`.
pub fn write_report_csv<W: Write>(records: &[RiskRecord], writer: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(writer);
    for r in records {
        w.serialize(r)?;
    }
    w.flush()?;
    Ok(())
}

pub fn read_report_csv<R: std::io::Read>(reader: R) -> Result<Vec<RiskRecord>> {
    csv::Reader::from_reader(reader).deserialize().map(|r| r.map_err(Error::from)).collect()
}
