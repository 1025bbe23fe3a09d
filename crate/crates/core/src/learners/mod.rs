//! Learners that fit causal models to observed test outcomes.

mod alpha;
mod path;
mod pc;
mod polytree;

pub use alpha::{f1_score, select_alpha};
pub use path::fit_path_model;
pub use pc::{pc_fit, pc_fit_with};
pub use polytree::{polytree_from_anm, polytree_from_anm_with, polytree_from_labels};

use serde::{Deserialize, Serialize};

use crate::dataset::Dataset;
use crate::error::{Error, Result};
use crate::query::Query;
use crate::stattests::TestOutcome;

/// A training example: a query and the outcome its test produced.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LabeledQuery {
    pub query: Query,
    pub outcome: TestOutcome,
}

/// Number of variables, requiring the columns to be exactly `0..n`.
pub(crate) fn full_width(d: &Dataset) -> Result<usize> {
    let n = d.n_cols();
    let mut cols = d.columns().to_vec();
    cols.sort_unstable();
    if cols.iter().enumerate().any(|(i, &c)| i != c) {
        return Err(Error::InvalidParams(format!("dataset must cover variables 0..{n}, got {:?}", d.columns())));
    }
    Ok(n)
}
