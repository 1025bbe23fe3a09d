//! Collider-free path models `(π, r)`: a node ordering plus the correlations
//! of adjacent nodes. Under joint Gaussianity the correlation of any two
//! nodes is the product of adjacent correlations between them.

use serde::{Deserialize, Serialize};

use super::graph::Dag;
use crate::error::{Error, Result};
use crate::query::Query;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "PathModelJson", into = "PathModelJson")]
pub struct PathModel {
    order: Vec<usize>,
    r: Vec<f64>,
    position: Vec<usize>,
}

#[derive(Serialize, Deserialize)]
struct PathModelJson {
    order: Vec<usize>,
    r: Vec<f64>,
}

impl TryFrom<PathModelJson> for PathModel {
    type Error = Error;
    fn try_from(j: PathModelJson) -> Result<Self> {
        PathModel::new(j.order, j.r)
    }
}

impl From<PathModel> for PathModelJson {
    fn from(m: PathModel) -> Self {
        PathModelJson { order: m.order, r: m.r }
    }
}

impl PathModel {
    pub fn new(order: Vec<usize>, r: Vec<f64>) -> Result<Self> {
        let n = order.len();
        if n < 2 {
            return Err(Error::InvalidGraph("a path needs at least two nodes".into()));
        }
        if r.len() != n - 1 {
            return Err(Error::InvalidGraph(format!("{} adjacent correlations for {n} nodes", r.len())));
        }
        let mut position = vec![usize::MAX; n];
        for (p, &v) in order.iter().enumerate() {
            if v >= n || position[v] != usize::MAX {
                return Err(Error::InvalidGraph("order is not a permutation of 0..n".into()));
            }
            position[v] = p;
        }
        if let Some(bad) = r.iter().find(|x| !(x.abs() < 1.0 && **x != 0.0)) {
            return Err(Error::InvalidGraph(format!("adjacent correlation {bad} outside (-1,0)∪(0,1)")));
        }
        Ok(PathModel { order, r, position })
    }

    pub fn n(&self) -> usize {
        self.order.len()
    }

    pub fn order(&self) -> &[usize] {
        &self.order
    }

    pub fn adjacent_corr(&self) -> &[f64] {
        &self.r
    }

    fn pos(&self, v: usize) -> Result<usize> {
        self.position.get(v).copied().ok_or(Error::UnknownNode(v))
    }

    fn pair(q: &Query) -> Result<(usize, usize)> {
        match q {
            Query::UnorderedPair(a, b) => Ok((*a, *b)),
            other => Err(Error::InvalidQuery(format!("expected an unordered pair, got {other}"))),
        }
    }

    /// Model correlation of two nodes; `1.0` for a node with itself.
    pub fn corr(&self, a: usize, b: usize) -> Result<f64> {
        let (pa, pb) = (self.pos(a)?, self.pos(b)?);
        let (lo, hi) = (pa.min(pb), pa.max(pb));
        Ok(self.r[lo..hi].iter().product())
    }

    /// Cumulative sign `s_v`: product of the adjacent signs from the start of
    /// the path up to `v`.
    pub fn cumulative_sign(&self, v: usize) -> Result<i8> {
        let p = self.pos(v)?;
        Ok(self.r[..p].iter().fold(1i8, |s, x| if *x < 0.0 { -s } else { s }))
    }

    /// The chain DAG `order[0] → order[1] → …` the path stands for.
    pub fn chain_dag(&self) -> Dag {
        Dag::chain(&self.order).expect("a permutation always forms a valid chain")
    }
}

pub fn path_corr(m: &PathModel, q: &Query) -> Result<f64> {
    let (a, b) = PathModel::pair(q)?;
    m.corr(a, b)
}

/// Sign of the model correlation, computed as `s_a · s_b`.
pub fn path_sign(m: &PathModel, q: &Query) -> Result<i8> {
    let (a, b) = PathModel::pair(q)?;
    Ok(m.cumulative_sign(a)? * m.cumulative_sign(b)?)
}
