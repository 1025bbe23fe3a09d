//! On-disk model files and query answering against them.

use serde::{Deserialize, Serialize};

use super::cpdag::random_dag_from_cpdag;
use super::graph::{is_polytree, Cpdag, Dag, GraphJson, Polytree};
use super::path::{path_corr, path_sign, PathModel};
use super::predict::{q_anm_polytree, q_ci_dag, q_dirpath, q_lingam_admissible, AncestorReading};
use crate::error::{Error, Result};
use crate::property::PropertyValue;
use crate::query::{Property, PropertyQuery};

/// A fitted model. Serialized with a `"model"` tag; untagged graph or path
/// JSON is also accepted on input.
#[derive(Debug, Clone, PartialEq)]
pub enum ModelFile {
    Dag(Dag),
    Cpdag(Cpdag),
    Polytree(Polytree),
    Path(PathModel),
}

#[derive(Serialize, Deserialize)]
#[serde(tag = "model", rename_all = "lowercase")]
enum Tagged {
    Dag(GraphJson),
    Cpdag(GraphJson),
    Polytree(GraphJson),
    Path(PathModel),
}

impl ModelFile {
    pub fn name(&self) -> &'static str {
        match self {
            ModelFile::Dag(_) => "dag",
            ModelFile::Cpdag(_) => "cpdag",
            ModelFile::Polytree(_) => "polytree",
            ModelFile::Path(_) => "path",
        }
    }

    pub fn to_json(&self) -> serde_json::Value {
        let t = match self {
            ModelFile::Dag(g) => Tagged::Dag(g.to_json()),
            ModelFile::Cpdag(c) => Tagged::Cpdag(c.to_json()),
            ModelFile::Polytree(p) => Tagged::Polytree(p.to_json()),
            ModelFile::Path(m) => Tagged::Path(m.clone()),
        };
        serde_json::to_value(t).expect("model serialization cannot fail")
    }

    pub fn from_json(v: serde_json::Value) -> Result<Self> {
        let tagged = if v.get("model").is_some() {
            serde_json::from_value(v)?
        } else if v.get("order").is_some() {
            Tagged::Path(serde_json::from_value(v)?)
        } else {
            let g: GraphJson = serde_json::from_value(v)?;
            if g.undirected.is_empty() {
                Tagged::Dag(g)
            } else {
                Tagged::Cpdag(g)
            }
        };
        Ok(match tagged {
            Tagged::Dag(g) => ModelFile::Dag(Dag::from_json(&g)?),
            Tagged::Cpdag(g) => ModelFile::Cpdag(Cpdag::from_json(&g)?),
            Tagged::Polytree(g) => ModelFile::Polytree(Polytree::new(Dag::from_json(&g)?)?),
            Tagged::Path(m) => ModelFile::Path(m),
        })
    }

    pub fn load(path: impl AsRef<std::path::Path>) -> Result<Self> {
        let text = std::fs::read_to_string(path)?;
        Self::from_json(serde_json::from_str(&text)?)
    }

    /// A DAG standing for the model where one is needed. A CPDAG is extended
    /// with `seed`; all extensions agree on CI predictions.
    fn as_dag(&self, seed: u64) -> Dag {
        match self {
            ModelFile::Dag(g) => g.clone(),
            ModelFile::Cpdag(c) => random_dag_from_cpdag(c, seed),
            ModelFile::Polytree(p) => p.dag().clone(),
            ModelFile::Path(m) => m.chain_dag(),
        }
    }

    /// Answer a property query. Path models answer graph queries through
    /// their implied forward chain.
    pub fn predict(&self, pq: &PropertyQuery, reading: AncestorReading, seed: u64) -> Result<PropertyValue> {
        let unsupported = || Error::UnsupportedQueryForModel {
            property: pq.property.prefix().to_string(),
            model: self.name().to_string(),
        };
        let q = &pq.query;
        match (pq.property, self) {
            (Property::Ci, m) => Ok(PropertyValue::Binary(q_ci_dag(&m.as_dag(seed), q)?)),
            (Property::Anm, ModelFile::Polytree(p)) => Ok(PropertyValue::Binary(q_anm_polytree(p, q)?)),
            (Property::Anm, ModelFile::Dag(g)) if is_polytree(g) => {
                Ok(PropertyValue::Binary(q_anm_polytree(&Polytree::new(g.clone())?, q)?))
            }
            (Property::Dir, ModelFile::Cpdag(_)) => Err(unsupported()),
            (Property::Dir, m) => Ok(PropertyValue::Binary(q_dirpath(&m.as_dag(seed), q)?)),
            (Property::Lingam, ModelFile::Cpdag(_)) => Err(unsupported()),
            (Property::Lingam, m) => Ok(PropertyValue::Binary(q_lingam_admissible(&m.as_dag(seed), q, reading)?)),
            (Property::Corr, ModelFile::Path(m)) => Ok(PropertyValue::Real(path_corr(m, q)?)),
            (Property::Sign, ModelFile::Path(m)) => Ok(PropertyValue::Sign(path_sign(m, q)?)),
            _ => Err(unsupported()),
        }
    }
}
