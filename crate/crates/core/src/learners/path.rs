use std::collections::VecDeque;

use super::full_width;
use crate::dataset::Dataset;
use crate::error::{Error, Result};
use crate::models::PathModel;
use crate::stattests::CorrelationMatrix;

/// Greedy chain: start from the pair with the largest `|corr|`, then keep
/// appending, at whichever end scores higher, the unused variable with the
/// largest `|corr|` to that end.
pub fn fit_path_model(d: &Dataset) -> Result<PathModel> {
    let n = full_width(d)?;
    if n < 2 {
        return Err(Error::InvalidSize("a path needs at least 2 variables".into()));
    }
    let c = CorrelationMatrix::from_dataset(d)?;
    let r = |a: usize, b: usize| c.get(a, b).expect("all columns present");
    for a in 0..n {
        for b in a + 1..n {
            if r(a, b).abs() <= 1e-12 {
                return Err(Error::ZeroCorrelation(a, b));
            }
            if r(a, b).abs() >= 1.0 {
                return Err(Error::DegenerateInput(format!("variables {a} and {b} are perfectly correlated")));
            }
        }
    }
    let mut best = (0, 1);
    for a in 0..n {
        for b in a + 1..n {
            if r(a, b).abs() > r(best.0, best.1).abs() {
                best = (a, b);
            }
        }
    }
    let mut chain = VecDeque::from([best.0, best.1]);
    let mut used = vec![false; n];
    used[best.0] = true;
    used[best.1] = true;
    while chain.len() < n {
        let (head, tail) = (chain[0], chain[chain.len() - 1]);
        let mut pick: Option<(f64, bool, usize)> = None;
        for v in (0..n).filter(|&v| !used[v]) {
            for (at_tail, end) in [(true, tail), (false, head)] {
                let score = r(end, v).abs();
                if pick.is_none_or(|(s, _, _)| score > s) {
                    pick = Some((score, at_tail, v));
                }
            }
        }
        let (_, at_tail, v) = pick.expect("unused variables remain");
        used[v] = true;
        if at_tail {
            chain.push_back(v);
        } else {
            chain.push_front(v);
        }
    }
    let order: Vec<usize> = chain.into_iter().collect();
    let adjacent = order.windows(2).map(|w| r(w[0], w[1])).collect();
    PathModel::new(order, adjacent)
}
