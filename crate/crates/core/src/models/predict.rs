//! Graph-induced predictors `Q_G` of binary statistical properties.

use std::collections::VecDeque;

use serde::{Deserialize, Serialize};

use super::graph::{Dag, Polytree};
use crate::error::{Error, Result};
use crate::query::Query;

fn ci_parts(q: &Query) -> Result<(usize, usize, &[usize])> {
    match q {
        Query::CondIndep { pair, cond } => Ok((pair.0, pair.1, cond.as_slice())),
        other => Err(Error::InvalidQuery(format!("expected a conditional independence query, got {other}"))),
    }
}

fn ordered_parts(q: &Query) -> Result<(usize, usize)> {
    match q {
        Query::OrderedPair { source, target } => Ok((*source, *target)),
        other => Err(Error::InvalidQuery(format!("expected an ordered pair, got {other}"))),
    }
}

/// Whether `y1` and `y2` are d-separated by `cond` in `g`, via the
/// reachability ("Bayes ball") formulation: a trail may pass a non-collider
/// outside the conditioning set, and a collider whose descendants meet it.
pub fn d_separated(g: &Dag, q: &Query) -> Result<u8> {
    let (y1, y2, cond) = ci_parts(q)?;
    for &v in [y1, y2].iter().chain(cond) {
        g.check_node(v)?;
    }
    let n = g.n();
    let mut in_cond = vec![false; n];
    for &z in cond {
        in_cond[z] = true;
    }
    let anc = g.ancestors_of(cond);

    // visited[v][0]: reached from a child (moving up), [1]: from a parent (moving down)
    let mut visited = vec![[false; 2]; n];
    let mut queue = VecDeque::from([(y1, 0usize)]);
    while let Some((v, dir)) = queue.pop_front() {
        if visited[v][dir] {
            continue;
        }
        visited[v][dir] = true;
        if v == y2 && !in_cond[v] {
            return Ok(0);
        }
        if dir == 0 && !in_cond[v] {
            queue.extend(g.parents(v).iter().map(|&p| (p, 0)));
            queue.extend(g.children(v).iter().map(|&c| (c, 1)));
        } else if dir == 1 {
            if !in_cond[v] {
                queue.extend(g.children(v).iter().map(|&c| (c, 1)));
            }
            if anc[v] {
                queue.extend(g.parents(v).iter().map(|&p| (p, 0)));
            }
        }
    }
    Ok(1)
}

/// CI prediction of a DAG under the global convention (1 = independence
/// predicted), i.e. d-separation with faithfulness read as "every
/// d-connection predicts dependence".
pub fn q_ci_dag(g: &Dag, q: &Query) -> Result<u8> {
    d_separated(g, q)
}

/// 1 iff there is a directed path `source → … → target`.
pub fn q_dirpath(g: &Dag, q: &Query) -> Result<u8> {
    let (i, j) = ordered_parts(q)?;
    g.check_node(i)?;
    g.check_node(j)?;
    Ok(g.descendants_of(i)[j] as u8)
}

/// 1 iff the polytree has the edge `source → target`.
pub fn q_anm_polytree(g: &Polytree, q: &Query) -> Result<u8> {
    let (i, j) = ordered_parts(q)?;
    g.check_node(i)?;
    g.check_node(j)?;
    Ok(g.has_edge(i, j) as u8)
}

/// How "no two members have a common ancestor" is read when judging
/// whether a tuple is causally sufficient.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum AncestorReading {
    /// A pair is confounded when some node outside the tuple reaches both
    /// members along directed paths that avoid the other tuple members, so
    /// marginalizing it away would leave correlated noise. Members that cause
    /// each other do not count.
    #[default]
    LatentConfounder,
    /// Literal reading: every node is its own ancestor, so a member that is an
    /// ancestor of another member already confounds the pair.
    Literal,
}

/// Whether the ordered tuple is causally sufficient in `g` and its order is
/// consistent with `g` (no later member is an ancestor of an earlier one).
pub fn q_lingam_admissible(g: &Dag, q: &Query, reading: AncestorReading) -> Result<u8> {
    let tuple = match q {
        Query::OrderedTuple(t) => t,
        other => return Err(Error::InvalidQuery(format!("expected an ordered tuple, got {other}"))),
    };
    for &v in tuple {
        g.check_node(v)?;
    }
    let n = g.n();
    let desc: Vec<Vec<bool>> = tuple.iter().map(|&v| g.descendants_of(v)).collect();

    // order consistency
    for i in 0..tuple.len() {
        for j in i + 1..tuple.len() {
            if desc[j][tuple[i]] {
                return Ok(0);
            }
        }
    }

    // causal sufficiency
    let mut member = vec![false; n];
    for &v in tuple {
        member[v] = true;
    }
    match reading {
        AncestorReading::LatentConfounder => {
            for w in (0..n).filter(|&w| !member[w]) {
                // members reachable from w through non-member intermediates
                let mut seen = vec![false; n];
                let mut stack = vec![w];
                let mut hits = 0;
                while let Some(u) = stack.pop() {
                    for &c in g.children(u) {
                        if seen[c] {
                            continue;
                        }
                        seen[c] = true;
                        if member[c] {
                            hits += 1;
                        } else {
                            stack.push(c);
                        }
                    }
                }
                if hits >= 2 {
                    return Ok(0);
                }
            }
        }
        AncestorReading::Literal => {
            let anc: Vec<Vec<bool>> = tuple.iter().map(|&v| g.ancestors_of(&[v])).collect();
            for i in 0..tuple.len() {
                for j in i + 1..tuple.len() {
                    if (0..n).any(|w| anc[i][w] && anc[j][w]) {
                        return Ok(0);
                    }
                }
            }
        }
    }
    Ok(1)
}
