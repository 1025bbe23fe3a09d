//! Causal models as predictors of statistical-test outcomes on variable
//! subsets, with VC-type generalization bounds, synthetic SCM generators, and
//! the simulation harness.

pub mod bounds;
pub mod dataset;
pub mod error;
pub mod harness;
pub mod learners;
pub mod models;
pub mod par;
pub mod property;
pub mod query;
pub mod risk;
pub mod rng;
pub mod stattests;
pub mod synthgen;

pub use dataset::{load_dataset, Dataset};
pub use error::{Error, Result};
pub use par::Execution;
pub use property::PropertyValue;
pub use query::{Property, PropertyQuery, Query, QueryKind, Universe, VarId};
pub use risk::empirical_error;
