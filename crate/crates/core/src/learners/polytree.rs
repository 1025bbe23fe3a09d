use std::collections::BTreeMap;

use super::{full_width, LabeledQuery};
use crate::dataset::Dataset;
use crate::error::{Error, Result};
use crate::models::{Dag, Polytree};
use crate::par::{try_map_slice, Execution};
use crate::query::{enumerate_queries, sample_queries, Query, QueryKind};
use crate::stattests::{AnmConfig, AnmTester, Tester};

/// Polytree from ANM tests on `k` ordered pairs drawn without replacement.
pub fn polytree_from_anm(d: &Dataset, k: usize, alpha: f64, seed: u64) -> Result<(Polytree, Vec<LabeledQuery>)> {
    polytree_from_anm_with(d, k, alpha, seed, &AnmConfig::default(), Execution::default())
}

pub fn polytree_from_anm_with(
    d: &Dataset,
    k: usize,
    alpha: f64,
    seed: u64,
    cfg: &AnmConfig,
    exec: Execution,
) -> Result<(Polytree, Vec<LabeledQuery>)> {
    let n = full_width(d)?;
    let universe = enumerate_queries(n, QueryKind::OrderedPair, 0)?;
    let pairs = sample_queries(&universe, k, seed)?;
    let tester = AnmTester::with_config(d, alpha, *cfg);
    let labels = try_map_slice(exec, &pairs, |q| {
        Ok::<_, Error>(LabeledQuery { query: q.clone(), outcome: tester.test(q)? })
    })?;
    Ok((polytree_from_labels(n, &labels)?, labels))
}

/// Adds `i → j` for every positive label, then, while the skeleton has an
/// undirected cycle (two opposite edges count as one), removes the cycle edge
/// with the lowest p-value. Labels without a p-value rank as `p = 1`.
pub fn polytree_from_labels(n: usize, labels: &[LabeledQuery]) -> Result<Polytree> {
    let mut edges: BTreeMap<(usize, usize), f64> = BTreeMap::new();
    for l in labels {
        let (s, t) = match &l.query {
            Query::OrderedPair { source, target } => (*source, *target),
            other => return Err(Error::InvalidQuery(format!("expected an ordered pair, got {other}"))),
        };
        if s >= n || t >= n {
            return Err(Error::UnknownNode(s.max(t)));
        }
        if l.outcome.binary() == Some(1) {
            edges.insert((s, t), l.outcome.p_value.unwrap_or(1.0));
        }
    }
    while let Some(cycle) = find_cycle(n, edges.keys().copied()) {
        let worst = cycle
            .into_iter()
            .min_by(|a, b| edges[a].total_cmp(&edges[b]).then(a.cmp(b)))
            .expect("cycles have edges");
        edges.remove(&worst);
    }
    Polytree::new(Dag::new(n, edges.into_keys())?)
}

/// Some undirected cycle as a list of directed edges, if one exists.
fn find_cycle(n: usize, edges: impl Iterator<Item = (usize, usize)>) -> Option<Vec<(usize, usize)>> {
    // forest adjacency: node -> (neighbor, original edge)
    let mut adj: Vec<Vec<(usize, (usize, usize))>> = vec![Vec::new(); n];
    for (a, b) in edges {
        if let Some(mut path) = forest_path(&adj, a, b) {
            path.push((a, b));
            return Some(path);
        }
        adj[a].push((b, (a, b)));
        adj[b].push((a, (a, b)));
    }
    None
}

fn forest_path(adj: &[Vec<(usize, (usize, usize))>], from: usize, to: usize) -> Option<Vec<(usize, usize)>> {
    let mut prev: Vec<Option<(usize, (usize, usize))>> = vec![None; adj.len()];
    let mut visited = vec![false; adj.len()];
    let mut stack = vec![from];
    visited[from] = true;
    while let Some(v) = stack.pop() {
        if v == to {
            let mut path = Vec::new();
            let mut cur = to;
            while let Some((p, e)) = prev[cur] {
                path.push(e);
                cur = p;
            }
            return Some(path);
        }
        for &(w, e) in &adj[v] {
            if !visited[w] {
                visited[w] = true;
                prev[w] = Some((v, e));
                stack.push(w);
            }
        }
    }
    None
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::models::{is_polytree, q_anm_polytree};
    use crate::property::PropertyValue;
    use crate::stattests::TestOutcome;

    fn label(s: usize, t: usize, v: bool, p: f64) -> LabeledQuery {
        LabeledQuery {
            query: Query::ordered_pair(s, t).unwrap(),
            outcome: TestOutcome { value: PropertyValue::binary(v), p_value: Some(p), alpha: Some(0.05) },
        }
    }

    #[test]
    fn keeps_positive_edges() {
        let labels = vec![label(0, 1, true, 0.5), label(1, 2, true, 0.5), label(2, 0, false, 0.01), label(1, 0, false, 0.0)];
        let p = polytree_from_labels(3, &labels).unwrap();
        assert_eq!(p.edges(), vec![(0, 1), (1, 2)]);
    }

    #[test]
    fn triangle_drops_lowest_p() {
        let labels = vec![label(0, 1, true, 0.2), label(1, 2, true, 0.3), label(0, 2, true, 0.01)];
        let p = polytree_from_labels(3, &labels).unwrap();
        assert_eq!(p.edges(), vec![(0, 1), (1, 2)]);
    }

    #[test]
    fn two_cycle_drops_lower_p() {
        let labels = vec![label(0, 1, true, 0.2), label(1, 0, true, 0.6)];
        assert_eq!(polytree_from_labels(2, &labels).unwrap().edges(), vec![(1, 0)]);
    }

    #[test]
    fn training_error_counts_removed_edges() {
        let mut r = crate::rng::rng(3);
        use rand::Rng;
        for _ in 0..200 {
            let n = 6;
            let labels: Vec<LabeledQuery> = enumerate_queries(n, QueryKind::OrderedPair, 0)
                .unwrap()
                .into_iter()
                .map(|q| {
                    let v = r.random_bool(0.3);
                    LabeledQuery {
                        query: q,
                        outcome: TestOutcome { value: PropertyValue::binary(v), p_value: Some(r.random()), alpha: None },
                    }
                })
                .collect();
            let p = polytree_from_labels(n, &labels).unwrap();
            assert!(is_polytree(&p));
            let positives = labels.iter().filter(|l| l.outcome.binary() == Some(1)).count();
            let wrong = labels
                .iter()
                .filter(|l| q_anm_polytree(&p, &l.query).unwrap() != l.outcome.binary().unwrap())
                .count();
            assert_eq!(wrong, positives - p.n_edges());
        }
    }
}
