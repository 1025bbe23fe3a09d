//! Directed acyclic graphs, polytrees and partially directed graphs.

use std::collections::{BTreeSet, VecDeque};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// JSON form shared by [`Dag`], [`Polytree`] and [`Cpdag`]:
/// `{"n": 3, "directed": [[0,1]], "undirected": [[1,2]]}`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct GraphJson {
    pub n: usize,
    #[serde(default)]
    pub directed: Vec<[usize; 2]>,
    #[serde(default)]
    pub undirected: Vec<[usize; 2]>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Dag {
    n: usize,
    parents: Vec<Vec<usize>>,
    children: Vec<Vec<usize>>,
}

impl Dag {
    pub fn new(n: usize, edges: impl IntoIterator<Item = (usize, usize)>) -> Result<Self> {
        let mut parents = vec![Vec::new(); n];
        let mut children = vec![Vec::new(); n];
        for (i, j) in edges {
            if i >= n || j >= n {
                return Err(Error::InvalidGraph(format!("edge ({i},{j}) out of range for n={n}")));
            }
            if i == j {
                return Err(Error::InvalidGraph(format!("self-loop at {i}")));
            }
            if children[i].contains(&j) {
                return Err(Error::InvalidGraph(format!("duplicate edge ({i},{j})")));
            }
            children[i].push(j);
            parents[j].push(i);
        }
        for v in 0..n {
            parents[v].sort_unstable();
            children[v].sort_unstable();
        }
        let g = Dag { n, parents, children };
        if g.topological_order().is_none() {
            return Err(Error::InvalidGraph("graph contains a directed cycle".into()));
        }
        Ok(g)
    }

    pub fn empty(n: usize) -> Self {
        Dag { n, parents: vec![Vec::new(); n], children: vec![Vec::new(); n] }
    }

    /// Chain `order[0] → order[1] → …`.
    pub fn chain(order: &[usize]) -> Result<Self> {
        Dag::new(order.len(), order.windows(2).map(|w| (w[0], w[1])))
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn parents(&self, v: usize) -> &[usize] {
        &self.parents[v]
    }

    pub fn children(&self, v: usize) -> &[usize] {
        &self.children[v]
    }

    pub fn has_edge(&self, i: usize, j: usize) -> bool {
        i < self.n && self.children[i].binary_search(&j).is_ok()
    }

    pub fn adjacent(&self, i: usize, j: usize) -> bool {
        self.has_edge(i, j) || self.has_edge(j, i)
    }

    pub fn n_edges(&self) -> usize {
        self.children.iter().map(Vec::len).sum()
    }

    /// Edges `(parent, child)` in lexicographic order.
    pub fn edges(&self) -> Vec<(usize, usize)> {
        (0..self.n).flat_map(|i| self.children[i].iter().map(move |&j| (i, j))).collect()
    }

    /// Unordered adjacencies `(min, max)`, sorted.
    pub fn skeleton(&self) -> BTreeSet<(usize, usize)> {
        self.edges().into_iter().map(|(i, j)| (i.min(j), i.max(j))).collect()
    }

    /// Unshielded colliders `(a, c, b)` with `a → c ← b`, `a < b`, `a`, `b` non-adjacent.
    pub fn v_structures(&self) -> BTreeSet<(usize, usize, usize)> {
        let mut out = BTreeSet::new();
        for c in 0..self.n {
            let ps = &self.parents[c];
            for (x, &a) in ps.iter().enumerate() {
                for &b in &ps[x + 1..] {
                    if !self.adjacent(a, b) {
                        out.insert((a, c, b));
                    }
                }
            }
        }
        out
    }

    pub fn topological_order(&self) -> Option<Vec<usize>> {
        let mut indeg: Vec<usize> = self.parents.iter().map(Vec::len).collect();
        let mut queue: VecDeque<usize> = (0..self.n).filter(|&v| indeg[v] == 0).collect();
        let mut order = Vec::with_capacity(self.n);
        while let Some(v) = queue.pop_front() {
            order.push(v);
            for &c in &self.children[v] {
                indeg[c] -= 1;
                if indeg[c] == 0 {
                    queue.push_back(c);
                }
            }
        }
        (order.len() == self.n).then_some(order)
    }

    /// Nodes with a directed path into some node of `set`, including `set` itself.
    pub fn ancestors_of(&self, set: &[usize]) -> Vec<bool> {
        let mut mark = vec![false; self.n];
        let mut stack: Vec<usize> = set.to_vec();
        while let Some(v) = stack.pop() {
            if !mark[v] {
                mark[v] = true;
                stack.extend(self.parents[v].iter().copied());
            }
        }
        mark
    }

    /// Nodes reachable from `v` along directed edges, including `v`.
    pub fn descendants_of(&self, v: usize) -> Vec<bool> {
        let mut mark = vec![false; self.n];
        let mut stack = vec![v];
        while let Some(u) = stack.pop() {
            if !mark[u] {
                mark[u] = true;
                stack.extend(self.children[u].iter().copied());
            }
        }
        mark
    }

    pub fn check_node(&self, v: usize) -> Result<()> {
        if v < self.n {
            Ok(())
        } else {
            Err(Error::UnknownNode(v))
        }
    }

    pub fn to_json(&self) -> GraphJson {
        GraphJson { n: self.n, directed: self.edges().into_iter().map(|(i, j)| [i, j]).collect(), undirected: vec![] }
    }

    pub fn from_json(g: &GraphJson) -> Result<Self> {
        if !g.undirected.is_empty() {
            return Err(Error::InvalidGraph("a DAG cannot have undirected edges".into()));
        }
        Dag::new(g.n, g.directed.iter().map(|e| (e[0], e[1])))
    }
}

/// Whether the skeleton of `g` has no undirected cycle.
pub fn is_polytree(g: &Dag) -> bool {
    let mut uf = UnionFind::new(g.n());
    g.edges().into_iter().all(|(i, j)| uf.union(i, j))
}

/// Same skeleton and same unshielded colliders.
pub fn markov_equivalent(g1: &Dag, g2: &Dag) -> Result<bool> {
    if g1.n() != g2.n() {
        return Err(Error::SizeMismatch(g1.n(), g2.n()));
    }
    Ok(g1.skeleton() == g2.skeleton() && g1.v_structures() == g2.v_structures())
}

/// A DAG whose skeleton is a forest.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Polytree(Dag);

impl Polytree {
    pub fn new(dag: Dag) -> Result<Self> {
        if is_polytree(&dag) {
            Ok(Polytree(dag))
        } else {
            Err(Error::InvalidGraph("skeleton contains an undirected cycle".into()))
        }
    }

    pub fn dag(&self) -> &Dag {
        &self.0
    }

    pub fn into_dag(self) -> Dag {
        self.0
    }
}

impl std::ops::Deref for Polytree {
    type Target = Dag;
    fn deref(&self) -> &Dag {
        &self.0
    }
}

/// Partially directed graph as produced by the PC algorithm.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Cpdag {
    n: usize,
    directed: BTreeSet<(usize, usize)>,
    undirected: BTreeSet<(usize, usize)>,
}

impl Cpdag {
    pub fn new(
        n: usize,
        directed: impl IntoIterator<Item = (usize, usize)>,
        undirected: impl IntoIterator<Item = (usize, usize)>,
    ) -> Result<Self> {
        let directed: BTreeSet<_> = directed.into_iter().collect();
        let undirected: BTreeSet<_> = undirected.into_iter().map(|(i, j)| (i.min(j), i.max(j))).collect();
        for &(i, j) in directed.iter().chain(&undirected) {
            if i >= n || j >= n || i == j {
                return Err(Error::InvalidGraph(format!("bad edge ({i},{j}) for n={n}")));
            }
        }
        for &(i, j) in &directed {
            if directed.contains(&(j, i)) || undirected.contains(&(i.min(j), i.max(j))) {
                return Err(Error::InvalidGraph(format!("pair ({i},{j}) has conflicting marks")));
            }
        }
        // directed part must be acyclic
        Dag::new(n, directed.iter().copied())?;
        Ok(Cpdag { n, directed, undirected })
    }

    pub fn from_dag(g: &Dag) -> Self {
        Cpdag { n: g.n(), directed: g.edges().into_iter().collect(), undirected: BTreeSet::new() }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn directed(&self) -> &BTreeSet<(usize, usize)> {
        &self.directed
    }

    pub fn undirected(&self) -> &BTreeSet<(usize, usize)> {
        &self.undirected
    }

    pub fn to_json(&self) -> GraphJson {
        GraphJson {
            n: self.n,
            directed: self.directed.iter().map(|&(i, j)| [i, j]).collect(),
            undirected: self.undirected.iter().map(|&(i, j)| [i, j]).collect(),
        }
    }

    pub fn from_json(g: &GraphJson) -> Result<Self> {
        Cpdag::new(
            g.n,
            g.directed.iter().map(|e| (e[0], e[1])),
            g.undirected.iter().map(|e| (e[0], e[1])),
        )
    }
}

pub(crate) struct UnionFind {
    parent: Vec<usize>,
}

impl UnionFind {
    pub(crate) fn new(n: usize) -> Self {
        UnionFind { parent: (0..n).collect() }
    }

    pub(crate) fn find(&mut self, mut x: usize) -> usize {
        while self.parent[x] != x {
            self.parent[x] = self.parent[self.parent[x]];
            x = self.parent[x];
        }
        x
    }

    /// Merges the sets of `a` and `b`; false if they were already joined.
    pub(crate) fn union(&mut self, a: usize, b: usize) -> bool {
        let (ra, rb) = (self.find(a), self.find(b));
        if ra == rb {
            return false;
        }
        self.parent[ra] = rb;
        true
    }
}

/// Every DAG on `n` labeled nodes (3^(n(n-1)/2) orientation patterns filtered
/// for acyclicity). Intended for small `n`.
pub fn enumerate_dags(n: usize) -> Vec<Dag> {
    let pairs: Vec<(usize, usize)> = (0..n).flat_map(|i| (i + 1..n).map(move |j| (i, j))).collect();
    let total = 3usize.pow(pairs.len() as u32);
    let mut out = Vec::new();
    for code in 0..total {
        let mut c = code;
        let mut edges = Vec::new();
        for &(i, j) in &pairs {
            match c % 3 {
                1 => edges.push((i, j)),
                2 => edges.push((j, i)),
                _ => {}
            }
            c /= 3;
        }
        if let Ok(g) = Dag::new(n, edges) {
            out.push(g);
        }
    }
    out
}
