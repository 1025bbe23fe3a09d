//! Ground-truth structural causal models and their samplers: linear-Gaussian
//! SCMs on random DAGs and additive-noise SCMs with tanh mechanisms on random
//! forests.

use std::collections::BTreeMap;

use nalgebra::DMatrix;
use rand::seq::SliceRandom;
use rand::Rng as _;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::dataset::Dataset;
use crate::error::{Error, Result};
use crate::models::{Dag, UnionFind};
use crate::par::{map_range, Execution};
use crate::rng::{self, Rng};

fn check_degree(n: usize, deg: f64) -> Result<f64> {
    if n < 2 {
        return Err(Error::InvalidSize(format!("need at least 2 nodes, got {n}")));
    }
    if !(deg > 0.0 && deg <= (n - 1) as f64) {
        return Err(Error::InvalidDegree(deg));
    }
    Ok(deg / (n - 1) as f64)
}

fn random_order(n: usize, r: &mut Rng) -> Vec<usize> {
    let mut order: Vec<usize> = (0..n).collect();
    order.shuffle(r);
    order
}

/// Linear SCM `x_j = n_j + Σ_i a_{j,i} x_i` with standard-normal noise.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LinearScm {
    n: usize,
    /// Nodes listed in causal order.
    order: Vec<usize>,
    /// `coeffs[child][parent]`.
    coeffs: Vec<Vec<f64>>,
}

impl LinearScm {
    /// Validates that `coeffs` is lower-triangular after relabeling by `order`.
    pub fn new(order: Vec<usize>, coeffs: Vec<Vec<f64>>) -> Result<Self> {
        let n = order.len();
        let pos = position_of(&order)?;
        if coeffs.len() != n || coeffs.iter().any(|r| r.len() != n) {
            return Err(Error::InvalidParams(format!("coefficient matrix must be {n}x{n}")));
        }
        for (i, row) in coeffs.iter().enumerate() {
            for (j, &a) in row.iter().enumerate() {
                if a != 0.0 && pos[j] >= pos[i] {
                    return Err(Error::InvalidParams(format!("coefficient {j}->{i} against the causal order")));
                }
                if !a.is_finite() {
                    return Err(Error::InvalidValue(format!("coefficient {a}")));
                }
            }
        }
        Ok(LinearScm { n, order, coeffs })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn order(&self) -> &[usize] {
        &self.order
    }

    pub fn coeffs(&self) -> &[Vec<f64>] {
        &self.coeffs
    }

    pub fn edges(&self) -> Vec<(usize, usize)> {
        let mut e = Vec::new();
        for (child, row) in self.coeffs.iter().enumerate() {
            for (parent, &a) in row.iter().enumerate() {
                if a != 0.0 {
                    e.push((parent, child));
                }
            }
        }
        e.sort_unstable();
        e
    }

    pub fn dag(&self) -> Dag {
        Dag::new(self.n, self.edges()).expect("coefficients respect the causal order")
    }

    /// `(I − A)^{-1} (I − A)^{-T}` for unit noise variances.
    pub fn population_covariance(&self) -> Vec<Vec<f64>> {
        let n = self.n;
        let a = DMatrix::from_fn(n, n, |i, j| self.coeffs[i][j]);
        let b = (DMatrix::identity(n, n) - a).try_inverse().expect("I - A is unit triangular up to permutation");
        let s = &b * b.transpose();
        (0..n).map(|i| (0..n).map(|j| 0.5 * (s[(i, j)] + s[(j, i)])).collect()).collect()
    }
}

fn position_of(order: &[usize]) -> Result<Vec<usize>> {
    let n = order.len();
    let mut pos = vec![usize::MAX; n];
    for (p, &v) in order.iter().enumerate() {
        if v >= n || pos[v] != usize::MAX {
            return Err(Error::InvalidParams(format!("order {order:?} is not a permutation")));
        }
        pos[v] = p;
    }
    Ok(pos)
}

/// Random linear SCM: uniform causal order, each forward pair an edge with
/// probability `expected_degree / (n − 1)`, coefficients from `U[0.1, 1)`.
pub fn gen_linear_scm(n: usize, expected_degree: f64, seed: u64) -> Result<LinearScm> {
    let p = check_degree(n, expected_degree)?;
    let mut r = rng::rng(seed);
    let order = random_order(n, &mut r);
    let mut coeffs = vec![vec![0.0; n]; n];
    for a in 0..n {
        for b in a + 1..n {
            if r.random_bool(p) {
                coeffs[order[b]][order[a]] = r.random_range(0.1..1.0);
            }
        }
    }
    Ok(LinearScm { n, order, coeffs })
}

/// One-hidden-layer mechanism `x ↦ Σ_h w2_h · tanh(w1_h · x + b_h)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Mechanism {
    pub w1: Vec<f64>,
    pub b: Vec<f64>,
    pub w2: Vec<f64>,
}

impl Mechanism {
    pub fn eval(&self, x: f64) -> f64 {
        self.w1.iter().zip(&self.b).zip(&self.w2).map(|((w1, b), w2)| w2 * (w1 * x + b).tanh()).sum()
    }

    fn random(cfg: &GamConfig, r: &mut Rng) -> Self {
        let weight = |r: &mut Rng| {
            let w = r.random_range(cfg.weight_range.0..cfg.weight_range.1);
            if cfg.negative_weights && r.random_bool(0.5) {
                -w
            } else {
                w
            }
        };
        let h = cfg.hidden;
        let w1 = (0..h).map(|_| weight(r)).collect();
        let b = (0..h).map(|_| r.random_range(cfg.bias_range.0..cfg.bias_range.1)).collect();
        let w2 = (0..h).map(|_| weight(r)).collect();
        Mechanism { w1, b, w2 }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct GamConfig {
    pub hidden: usize,
    pub weight_range: (f64, f64),
    pub bias_range: (f64, f64),
    pub noise: (f64, f64),
    /// Flip the sign of each weight with probability 1/2.
    pub negative_weights: bool,
}

impl Default for GamConfig {
    fn default() -> Self {
        GamConfig { hidden: 20, weight_range: (0.1, 1.0), bias_range: (-1.0, 1.0), noise: (-0.5, 0.5), negative_weights: false }
    }
}

impl GamConfig {
    fn validate(&self) -> Result<()> {
        let ok = |(lo, hi): (f64, f64)| lo.is_finite() && hi.is_finite() && lo < hi;
        if self.hidden == 0 || !ok(self.weight_range) || !ok(self.bias_range) || !ok(self.noise) {
            return Err(Error::InvalidParams(format!("invalid GAM config {self:?}")));
        }
        Ok(())
    }
}

/// Additive-noise SCM on a forest: `x_j = Σ_{i→j} f_{i,j}(x_i) + n_j` with
/// uniform noise.
#[derive(Debug, Clone, PartialEq)]
pub struct GamScm {
    n: usize,
    order: Vec<usize>,
    dag: Dag,
    mechanisms: BTreeMap<(usize, usize), Mechanism>,
    noise: (f64, f64),
}

#[derive(Serialize)]
struct MechanismEntry<'a> {
    from: usize,
    to: usize,
    #[serde(flatten)]
    mechanism: &'a Mechanism,
}

impl GamScm {
    pub fn n(&self) -> usize {
        self.n
    }

    pub fn order(&self) -> &[usize] {
        &self.order
    }

    pub fn dag(&self) -> &Dag {
        &self.dag
    }

    pub fn noise(&self) -> (f64, f64) {
        self.noise
    }

    pub fn mechanism(&self, from: usize, to: usize) -> Option<&Mechanism> {
        self.mechanisms.get(&(from, to))
    }

    /// Deterministic part of node `v` given the values of all nodes.
    pub fn signal(&self, v: usize, values: &[f64]) -> f64 {
        self.dag.parents(v).iter().map(|&p| self.mechanisms[&(p, v)].eval(values[p])).sum()
    }

    /// SCM on a fixed forest; `edges` must follow `order`.
    pub fn with_structure(order: Vec<usize>, edges: &[(usize, usize)], cfg: &GamConfig, seed: u64) -> Result<Self> {
        cfg.validate()?;
        let n = order.len();
        let pos = position_of(&order)?;
        let mut uf = UnionFind::new(n);
        for &(a, b) in edges {
            if a >= n || b >= n || pos[a] >= pos[b] {
                return Err(Error::InvalidGraph(format!("edge {a}->{b} against the causal order")));
            }
            if !uf.union(a, b) {
                return Err(Error::InvalidGraph(format!("edge {a}->{b} closes an undirected cycle")));
            }
        }
        let dag = Dag::new(n, edges.iter().copied())?;
        let mut r = rng::rng(seed);
        let mut sorted = edges.to_vec();
        sorted.sort_unstable();
        let mechanisms = sorted.into_iter().map(|e| (e, Mechanism::random(cfg, &mut r))).collect();
        Ok(GamScm { n, order, dag, mechanisms, noise: cfg.noise })
    }
}

/// Random GAM SCM: edges proposed as in [`gen_linear_scm`], in lexicographic
/// order of causal positions, and rejected when they would close an undirected
/// cycle.
pub fn gen_gam_scm(n: usize, expected_degree: f64, seed: u64) -> Result<GamScm> {
    gen_gam_scm_with(n, expected_degree, &GamConfig::default(), seed)
}

pub fn gen_gam_scm_with(n: usize, expected_degree: f64, cfg: &GamConfig, seed: u64) -> Result<GamScm> {
    let p = check_degree(n, expected_degree)?;
    cfg.validate()?;
    let mut r = rng::rng(seed);
    let order = random_order(n, &mut r);
    let mut uf = UnionFind::new(n);
    let mut mechanisms = BTreeMap::new();
    for a in 0..n {
        for b in a + 1..n {
            if r.random_bool(p) {
                let (i, j) = (order[a], order[b]);
                if uf.union(i, j) {
                    mechanisms.insert((i, j), Mechanism::random(cfg, &mut r));
                }
            }
        }
    }
    let dag = Dag::new(n, mechanisms.keys().copied())?;
    Ok(GamScm { n, order, dag, mechanisms, noise: cfg.noise })
}

#[derive(Debug, Clone, PartialEq)]
pub enum Scm {
    Linear(LinearScm),
    Gam(GamScm),
}

impl From<LinearScm> for Scm {
    fn from(s: LinearScm) -> Self {
        Scm::Linear(s)
    }
}

impl From<GamScm> for Scm {
    fn from(s: GamScm) -> Self {
        Scm::Gam(s)
    }
}

impl Scm {
    pub fn n(&self) -> usize {
        match self {
            Scm::Linear(s) => s.n,
            Scm::Gam(s) => s.n,
        }
    }

    pub fn order(&self) -> &[usize] {
        match self {
            Scm::Linear(s) => &s.order,
            Scm::Gam(s) => &s.order,
        }
    }

    pub fn dag(&self) -> Dag {
        match self {
            Scm::Linear(s) => s.dag(),
            Scm::Gam(s) => s.dag.clone(),
        }
    }

    /// `{"order", "edges", "coeffs" | "mechanisms"}`.
    pub fn truth_json(&self) -> serde_json::Value {
        let dag = self.dag();
        let mut v = serde_json::json!({ "order": self.order(), "edges": dag.edges() });
        match self {
            Scm::Linear(s) => v["coeffs"] = serde_json::json!(s.coeffs),
            Scm::Gam(s) => {
                let m: Vec<MechanismEntry> =
                    s.mechanisms.iter().map(|(&(from, to), mechanism)| MechanismEntry { from, to, mechanism }).collect();
                v["mechanisms"] = serde_json::json!(m);
                v["noise"] = serde_json::json!([s.noise.0, s.noise.1]);
            }
        }
        v
    }

    fn draw_row(&self, r: &mut Rng, values: &mut [f64], noise: &mut [f64]) {
        match self {
            Scm::Linear(s) => {
                for &v in &s.order {
                    let e: f64 = r.sample(StandardNormal);
                    noise[v] = e;
                    values[v] = e + s.coeffs[v].iter().zip(values.iter()).map(|(a, x)| a * x).sum::<f64>();
                }
            }
            Scm::Gam(s) => {
                for &v in &s.order {
                    let e = r.random_range(s.noise.0..s.noise.1);
                    noise[v] = e;
                    values[v] = e + s.signal(v, values);
                }
            }
        }
    }
}

/// A sample together with the model that generated it.
#[derive(Debug, Clone)]
pub struct ScmSample {
    pub dataset: Dataset,
    pub truth: Scm,
    /// The noise draws, column-major like the dataset.
    pub noise: Vec<Vec<f64>>,
}

/// `l` i.i.d. rows. Row `i` draws from its own RNG stream, so the result does
/// not depend on the execution mode.
pub fn sample(scm: impl Into<Scm>, l: usize, seed: u64) -> Result<ScmSample> {
    sample_with(scm, l, seed, Execution::default())
}

pub fn sample_with(scm: impl Into<Scm>, l: usize, seed: u64, exec: Execution) -> Result<ScmSample> {
    let scm = scm.into();
    if l == 0 {
        return Err(Error::InvalidSize("sample size must be at least 1".into()));
    }
    let n = scm.n();
    let rows = map_range(exec, l, |i| {
        let mut r = rng::stream_rng(seed, i as u64);
        let mut values = vec![0.0; n];
        let mut noise = vec![0.0; n];
        scm.draw_row(&mut r, &mut values, &mut noise);
        (values, noise)
    });
    let mut data = vec![Vec::with_capacity(l); n];
    let mut noise = vec![Vec::with_capacity(l); n];
    for (vals, ns) in rows {
        for v in 0..n {
            data[v].push(vals[v]);
            noise[v].push(ns[v]);
        }
    }
    let dataset = Dataset::from_columns((0..n).collect(), data)?;
    Ok(ScmSample { dataset, truth: scm, noise })
}
