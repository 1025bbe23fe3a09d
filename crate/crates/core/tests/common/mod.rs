#![allow(dead_code)]

use causal_vc::models::Dag;
use causal_vc::rng;
use rand::seq::SliceRandom;
use rand::Rng;

/// Random DAG: uniform node order, each forward pair an edge with probability `p`.
pub fn random_dag(n: usize, p: f64, seed: u64) -> Dag {
    let mut r = rng::rng(seed);
    let mut order: Vec<usize> = (0..n).collect();
    order.shuffle(&mut r);
    let mut edges = Vec::new();
    for a in 0..n {
        for b in a + 1..n {
            if r.random_bool(p) {
                edges.push((order[a], order[b]));
            }
        }
    }
    Dag::new(n, edges).unwrap()
}

/// d-separation via the moral graph of the ancestral set: `x ⊥ y | z` iff
/// removing `z` from the moralized ancestral graph of `{x, y} ∪ z`
/// disconnects `x` from `y`.
pub fn moral_dsep(g: &Dag, x: usize, y: usize, z: &[usize]) -> bool {
    let n = g.n();
    let mut anc = vec![false; n];
    let mut stack: Vec<usize> = [x, y].iter().chain(z).copied().collect();
    while let Some(v) = stack.pop() {
        if !anc[v] {
            anc[v] = true;
            stack.extend(g.parents(v).iter().copied());
        }
    }
    let mut adj = vec![vec![false; n]; n];
    for v in (0..n).filter(|&v| anc[v]) {
        let ps = g.parents(v);
        for &p in ps {
            adj[p][v] = true;
            adj[v][p] = true;
        }
        for &p in ps {
            for &q in ps {
                if p != q {
                    adj[p][q] = true;
                }
            }
        }
    }
    let blocked: Vec<bool> = (0..n).map(|v| z.contains(&v)).collect();
    let mut seen = vec![false; n];
    let mut stack = vec![x];
    seen[x] = true;
    while let Some(v) = stack.pop() {
        if v == y {
            return false;
        }
        for w in 0..n {
            if adj[v][w] && anc[w] && !blocked[w] && !seen[w] {
                seen[w] = true;
                stack.push(w);
            }
        }
    }
    true
}

/// Two-sample Kolmogorov–Smirnov test; returns the asymptotic p-value.
pub fn ks_two_sample(a: &[f64], b: &[f64]) -> f64 {
    let mut a = a.to_vec();
    let mut b = b.to_vec();
    a.sort_by(f64::total_cmp);
    b.sort_by(f64::total_cmp);
    let (n, m) = (a.len(), b.len());
    let (mut i, mut j, mut d) = (0, 0, 0.0f64);
    while i < n && j < m {
        let v = a[i].min(b[j]);
        while i < n && a[i] <= v {
            i += 1;
        }
        while j < m && b[j] <= v {
            j += 1;
        }
        d = d.max((i as f64 / n as f64 - j as f64 / m as f64).abs());
    }
    let ne = (n * m) as f64 / (n + m) as f64;
    let lambda = (ne.sqrt() + 0.12 + 0.11 / ne.sqrt()) * d;
    kolmogorov_sf(lambda)
}

fn kolmogorov_sf(lambda: f64) -> f64 {
    if lambda < 1e-3 {
        return 1.0;
    }
    let mut s = 0.0;
    for k in 1..200 {
        let kf = k as f64;
        let term = 2.0 * (-1f64).powi(k - 1) * (-2.0 * kf * kf * lambda * lambda).exp();
        s += term;
        if term.abs() < 1e-12 {
            break;
        }
    }
    s.clamp(0.0, 1.0)
}

/// Sample covariance (divisor `l`).
pub fn cov(x: &[f64], y: &[f64]) -> f64 {
    let l = x.len() as f64;
    let mx = x.iter().sum::<f64>() / l;
    let my = y.iter().sum::<f64>() / l;
    x.iter().zip(y).map(|(a, b)| (a - mx) * (b - my)).sum::<f64>() / l
}

pub fn corr(x: &[f64], y: &[f64]) -> f64 {
    cov(x, y) / (cov(x, x) * cov(y, y)).sqrt()
}
