use super::{TestOutcome, Tester};
use crate::error::Result;
use crate::models::{d_separated, q_anm_polytree, Dag, Polytree};
use crate::property::PropertyValue;
use crate::query::Query;

/// Noise-free CI "test": d-separation in the true DAG.
#[derive(Debug, Clone)]
pub struct DSeparationOracle(pub Dag);

impl Tester for DSeparationOracle {
    fn test(&self, q: &Query) -> Result<TestOutcome> {
        Ok(TestOutcome::estimate(PropertyValue::Binary(d_separated(&self.0, q)?)))
    }
}

/// Noise-free ANM "test": the edge set of the true polytree.
#[derive(Debug, Clone)]
pub struct EdgeOracle(pub Polytree);

impl Tester for EdgeOracle {
    fn test(&self, q: &Query) -> Result<TestOutcome> {
        Ok(TestOutcome::estimate(PropertyValue::Binary(q_anm_polytree(&self.0, q)?)))
    }
}
