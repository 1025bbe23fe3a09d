//! Causal model classes acting as predictors of statistical properties.

pub mod cpdag;
pub mod file;
pub mod glue;
pub mod graph;
pub mod path;
pub mod predict;

pub use cpdag::{cpdag_of, random_dag_from_cpdag};
pub use file::ModelFile;
pub use glue::glue_gaussian_chain;
pub use graph::{enumerate_dags, is_polytree, markov_equivalent, Cpdag, Dag, GraphJson, Polytree};
pub(crate) use graph::UnionFind;
pub use path::{path_corr, path_sign, PathModel};
pub use predict::{d_separated, q_anm_polytree, q_ci_dag, q_dirpath, q_lingam_admissible, AncestorReading};
