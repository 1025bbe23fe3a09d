use std::collections::{BTreeMap, HashMap};

use super::{full_width, LabeledQuery};
use crate::dataset::Dataset;
use crate::error::Result;
use crate::models::cpdag::Pdag;
use crate::models::Cpdag;
use crate::query::{subsets, Query};
use crate::stattests::{FisherZ, Tester};

/// PC with Fisher-Z tests and conditioning sets of size at most `max_cond`.
pub fn pc_fit(d: &Dataset, alpha: f64, max_cond: usize) -> Result<(Cpdag, Vec<LabeledQuery>)> {
    let n = full_width(d)?;
    pc_fit_with(n, &FisherZ::new(d, alpha)?, max_cond)
}

/// PC over `0..n` with an arbitrary CI tester. Edges are visited in
/// lexicographic order and removed as soon as a separating set is found; the
/// first such set drives collider orientation. Every distinct query the run
/// executes is returned once, in execution order.
pub fn pc_fit_with<T: Tester + ?Sized>(n: usize, tester: &T, max_cond: usize) -> Result<(Cpdag, Vec<LabeledQuery>)> {
    let mut g = Pdag::complete(n);
    let mut sepsets: BTreeMap<(usize, usize), Vec<usize>> = BTreeMap::new();
    let mut seen: HashMap<Query, usize> = HashMap::new();
    let mut labels: Vec<LabeledQuery> = Vec::new();

    for s in 0..=max_cond {
        let mut any_candidate = false;
        for i in 0..n {
            for j in 0..n {
                if i == j || !g.adjacent(i, j) {
                    continue;
                }
                let others: Vec<usize> = g.neighbors(i).into_iter().filter(|&v| v != j).collect();
                if others.len() < s {
                    continue;
                }
                any_candidate = true;
                for cond in subsets(&others, s) {
                    let q = Query::cond_indep(i, j, cond.clone())?;
                    let independent = match seen.get(&q) {
                        Some(&idx) => labels[idx].outcome.binary() == Some(1),
                        None => {
                            let outcome = tester.test(&q)?;
                            let v = outcome.binary() == Some(1);
                            seen.insert(q.clone(), labels.len());
                            labels.push(LabeledQuery { query: q, outcome });
                            v
                        }
                    };
                    if independent {
                        g.remove_edge(i, j);
                        sepsets.insert((i.min(j), i.max(j)), cond);
                        break;
                    }
                }
            }
        }
        if !any_candidate {
            break;
        }
    }

    g.orient_v_structures(|a, b, c| sepsets.get(&(a.min(b), a.max(b))).is_some_and(|s| s.contains(&c)));
    g.apply_meek_rules();
    Ok((g.to_cpdag(), labels))
}
