//! Working representation of partially directed graphs, Meek orientation
//! rules, and randomized extension of a CPDAG to a member DAG.

use rand::seq::IndexedRandom;

use super::graph::{Cpdag, Dag};
use crate::rng;

/// Mutable partially directed graph over `0..n`.
#[derive(Debug, Clone)]
pub(crate) struct Pdag {
    n: usize,
    adj: Vec<Vec<bool>>,
    /// `dir[i][j]`: the edge between `i` and `j` is oriented `i → j`.
    dir: Vec<Vec<bool>>,
}

impl Pdag {
    pub(crate) fn complete(n: usize) -> Self {
        let adj = (0..n).map(|i| (0..n).map(|j| i != j).collect()).collect();
        Pdag { n, adj, dir: vec![vec![false; n]; n] }
    }

    pub(crate) fn from_skeleton(n: usize, edges: impl IntoIterator<Item = (usize, usize)>) -> Self {
        let mut g = Pdag { n, adj: vec![vec![false; n]; n], dir: vec![vec![false; n]; n] };
        for (i, j) in edges {
            g.adj[i][j] = true;
            g.adj[j][i] = true;
        }
        g
    }

    pub(crate) fn adjacent(&self, i: usize, j: usize) -> bool {
        self.adj[i][j]
    }

    pub(crate) fn directed(&self, i: usize, j: usize) -> bool {
        self.dir[i][j]
    }

    pub(crate) fn undirected(&self, i: usize, j: usize) -> bool {
        self.adj[i][j] && !self.dir[i][j] && !self.dir[j][i]
    }

    pub(crate) fn remove_edge(&mut self, i: usize, j: usize) {
        self.adj[i][j] = false;
        self.adj[j][i] = false;
        self.dir[i][j] = false;
        self.dir[j][i] = false;
    }

    pub(crate) fn neighbors(&self, i: usize) -> Vec<usize> {
        (0..self.n).filter(|&j| self.adj[i][j]).collect()
    }

    fn has_directed_path(&self, from: usize, to: usize) -> bool {
        let mut seen = vec![false; self.n];
        let mut stack = vec![from];
        while let Some(v) = stack.pop() {
            if v == to {
                return true;
            }
            if std::mem::replace(&mut seen[v], true) {
                continue;
            }
            stack.extend((0..self.n).filter(|&w| self.dir[v][w]));
        }
        false
    }

    /// Orients the undirected edge `i - j` as `i → j` unless that would close
    /// a directed cycle. Returns whether the edge was oriented.
    pub(crate) fn orient(&mut self, i: usize, j: usize) -> bool {
        if !self.undirected(i, j) || self.has_directed_path(j, i) {
            return false;
        }
        self.dir[i][j] = true;
        true
    }

    /// Orients every unshielded triple `a - c - b` whose middle node is not in
    /// the separating set of `(a, b)` as a collider `a → c ← b`.
    pub(crate) fn orient_v_structures(&mut self, in_sepset: impl Fn(usize, usize, usize) -> bool) {
        let n = self.n;
        for a in 0..n {
            for b in a + 1..n {
                if self.adj[a][b] {
                    continue;
                }
                for c in 0..n {
                    if self.adj[a][c] && self.adj[b][c] && !in_sepset(a, b, c) {
                        // already-oriented conflicting edges are left as they are
                        self.orient(a, c);
                        self.orient(b, c);
                    }
                }
            }
        }
    }

    /// Meek rules R1–R3 to a fixpoint (complete for CPDAGs without background
    /// knowledge).
    pub(crate) fn apply_meek_rules(&mut self) {
        let n = self.n;
        loop {
            let mut changed = false;
            for a in 0..n {
                for b in 0..n {
                    if !self.undirected(a, b) {
                        continue;
                    }
                    // R1: c → a - b, c and b non-adjacent ⇒ a → b
                    let r1 = (0..n).any(|c| self.dir[c][a] && !self.adj[c][b] && c != b);
                    // R2: a → c → b with a - b ⇒ a → b
                    let r2 = (0..n).any(|c| self.dir[a][c] && self.dir[c][b]);
                    // R3: a - c → b, a - d → b, c and d non-adjacent ⇒ a → b
                    let r3 = {
                        let cs: Vec<usize> =
                            (0..n).filter(|&c| self.undirected(a, c) && self.dir[c][b]).collect();
                        cs.iter().enumerate().any(|(x, &c)| cs[x + 1..].iter().any(|&d| !self.adj[c][d]))
                    };
                    if (r1 || r2 || r3) && self.orient(a, b) {
                        changed = true;
                    }
                }
            }
            if !changed {
                break;
            }
        }
    }

    pub(crate) fn to_cpdag(&self) -> Cpdag {
        let mut directed = Vec::new();
        let mut undirected = Vec::new();
        for i in 0..self.n {
            for j in 0..self.n {
                if self.dir[i][j] {
                    directed.push((i, j));
                } else if i < j && self.undirected(i, j) {
                    undirected.push((i, j));
                }
            }
        }
        Cpdag::new(self.n, directed, undirected).expect("orientation keeps the directed part acyclic")
    }

    pub(crate) fn from_cpdag(c: &Cpdag) -> Self {
        let mut g = Pdag::from_skeleton(c.n(), c.directed().iter().chain(c.undirected()).copied());
        for &(i, j) in c.directed() {
            g.dir[i][j] = true;
        }
        g
    }
}

/// CPDAG (essential graph) of the Markov equivalence class of `g`.
pub fn cpdag_of(g: &Dag) -> Cpdag {
    let mut p = Pdag::from_skeleton(g.n(), g.edges());
    let vs = g.v_structures();
    for &(a, c, b) in &vs {
        p.orient(a, c);
        p.orient(b, c);
    }
    p.apply_meek_rules();
    p.to_cpdag()
}

/// Draws a DAG from the class represented by `c`.
///
/// Runs the Dor–Tarsi sink-elimination procedure with a uniformly random
/// choice among admissible sinks, so every member of a valid class can be
/// produced. If `c` admits no consistent extension, the edges left over are
/// oriented along a random topological order of the remaining directed part,
/// which always yields an acyclic result.
pub fn random_dag_from_cpdag(c: &Cpdag, seed: u64) -> Dag {
    let mut r = rng::rng(seed);
    let n = c.n();
    let p = Pdag::from_cpdag(c);
    let mut alive = vec![true; n];
    let mut edges: Vec<(usize, usize)> = c.directed().iter().copied().collect();

    let mut remaining = n;
    while remaining > 0 {
        let candidates: Vec<usize> = (0..n)
            .filter(|&x| alive[x])
            .filter(|&x| !(0..n).any(|y| alive[y] && p.directed(x, y)))
            .filter(|&x| {
                let nb: Vec<usize> = (0..n).filter(|&y| alive[y] && p.adjacent(x, y)).collect();
                nb.iter()
                    .filter(|&&y| p.undirected(x, y))
                    .all(|&y| nb.iter().all(|&z| z == y || p.adjacent(y, z)))
            })
            .collect();
        let Some(&x) = candidates.choose(&mut r) else { break };
        for y in 0..n {
            if alive[y] && p.undirected(x, y) {
                edges.push((y, x));
            }
        }
        alive[x] = false;
        remaining -= 1;
    }

    if remaining > 0 {
        // random linear extension of the remaining directed edges
        let mut indeg = vec![0usize; n];
        for i in 0..n {
            for j in 0..n {
                if alive[i] && alive[j] && p.directed(i, j) {
                    indeg[j] += 1;
                }
            }
        }
        let mut rank = vec![usize::MAX; n];
        let mut next = 0;
        let mut ready: Vec<usize> = (0..n).filter(|&v| alive[v] && indeg[v] == 0).collect();
        while !ready.is_empty() {
            let k = rand::Rng::random_range(&mut r, 0..ready.len());
            let v = ready.swap_remove(k);
            rank[v] = next;
            next += 1;
            for w in 0..n {
                if alive[w] && p.directed(v, w) {
                    indeg[w] -= 1;
                    if indeg[w] == 0 {
                        ready.push(w);
                    }
                }
            }
        }
        for i in 0..n {
            for j in i + 1..n {
                if alive[i] && alive[j] && p.undirected(i, j) {
                    edges.push(if rank[i] < rank[j] { (i, j) } else { (j, i) });
                }
            }
        }
    }
    Dag::new(n, edges).expect("extension is acyclic by construction")
}
