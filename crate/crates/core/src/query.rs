//! Variable tuples on which statistical properties are evaluated.
//!
//! A [`Query`] is the canonical representative of a "partly ordered" tuple:
//! the target pair and conditioning set of a conditional-independence query
//! are unordered, an ordered pair or tuple keeps its order.

use std::fmt;
use std::path::Path;
use std::str::FromStr;

use rand::seq::index;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::rng;

/// Index of a variable in the global universe `0..n`.
pub type VarId = usize;

/// Optional display names for the global universe, loaded from a sidecar
/// `{"names": [...]}` JSON file.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Universe {
    pub names: Vec<String>,
}

impl Universe {
    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let file = std::fs::File::open(path)?;
        Ok(serde_json::from_reader(std::io::BufReader::new(file))?)
    }

    pub fn len(&self) -> usize {
        self.names.len()
    }

    pub fn is_empty(&self) -> bool {
        self.names.is_empty()
    }

    pub fn resolve(&self, name: &str) -> Option<VarId> {
        self.names.iter().position(|n| n == name)
    }

    pub fn name(&self, id: VarId) -> Option<&str> {
        self.names.get(id).map(String::as_str)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum QueryKind {
    CondIndep,
    OrderedPair,
    UnorderedPair,
    OrderedTuple,
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Query {
    /// `pair.0 ⊥ pair.1 | cond`.
    CondIndep { pair: (VarId, VarId), cond: Vec<VarId> },
    OrderedPair { source: VarId, target: VarId },
    UnorderedPair(VarId, VarId),
    OrderedTuple(Vec<VarId>),
}

fn sorted_pair(a: VarId, b: VarId) -> (VarId, VarId) {
    if a <= b {
        (a, b)
    } else {
        (b, a)
    }
}

fn all_distinct(ids: &[VarId]) -> bool {
    let mut v = ids.to_vec();
    v.sort_unstable();
    v.windows(2).all(|w| w[0] != w[1])
}

impl Query {
    pub fn cond_indep(a: VarId, b: VarId, cond: impl Into<Vec<VarId>>) -> Result<Self> {
        let q = Query::CondIndep { pair: (a, b), cond: cond.into() };
        q.validate()?;
        Ok(q.canonical())
    }

    pub fn ordered_pair(source: VarId, target: VarId) -> Result<Self> {
        let q = Query::OrderedPair { source, target };
        q.validate()?;
        Ok(q)
    }

    pub fn unordered_pair(a: VarId, b: VarId) -> Result<Self> {
        let q = Query::UnorderedPair(a, b);
        q.validate()?;
        Ok(q.canonical())
    }

    pub fn ordered_tuple(members: impl Into<Vec<VarId>>) -> Result<Self> {
        let q = Query::OrderedTuple(members.into());
        q.validate()?;
        Ok(q)
    }

    pub fn kind(&self) -> QueryKind {
        match self {
            Query::CondIndep { .. } => QueryKind::CondIndep,
            Query::OrderedPair { .. } => QueryKind::OrderedPair,
            Query::UnorderedPair(..) => QueryKind::UnorderedPair,
            Query::OrderedTuple(_) => QueryKind::OrderedTuple,
        }
    }

    /// Members are pairwise distinct; tuples are non-empty.
    pub fn validate(&self) -> Result<()> {
        let members = self.members();
        if members.is_empty() {
            return Err(Error::InvalidQuery("empty tuple".into()));
        }
        if !all_distinct(&members) {
            return Err(Error::InvalidQuery(format!("repeated variable in {self}")));
        }
        Ok(())
    }

    /// Unique representative of the query's equivalence class: sorted target
    /// pair and conditioning set for CI queries, sorted unordered pairs.
    pub fn canonical(&self) -> Query {
        match self {
            Query::CondIndep { pair, cond } => {
                let mut cond = cond.clone();
                cond.sort_unstable();
                Query::CondIndep { pair: sorted_pair(pair.0, pair.1), cond }
            }
            Query::UnorderedPair(a, b) => {
                let (a, b) = sorted_pair(*a, *b);
                Query::UnorderedPair(a, b)
            }
            other => other.clone(),
        }
    }

    /// Members in canonical order (CI: target pair first, then conditioning set).
    pub fn members(&self) -> Vec<VarId> {
        match self.canonical() {
            Query::CondIndep { pair, cond } => {
                let mut m = vec![pair.0, pair.1];
                m.extend(cond);
                m
            }
            Query::OrderedPair { source, target } => vec![source, target],
            Query::UnorderedPair(a, b) => vec![a, b],
            Query::OrderedTuple(m) => m,
        }
    }
}

impl fmt::Display for Query {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let join = |v: &[VarId]| v.iter().map(|x| x.to_string()).collect::<Vec<_>>().join(",");
        match self {
            Query::CondIndep { pair, cond } => write!(f, "ci:{},{}|{}", pair.0, pair.1, join(cond)),
            Query::OrderedPair { source, target } => write!(f, "{source}->{target}"),
            Query::UnorderedPair(a, b) => write!(f, "{a},{b}"),
            Query::OrderedTuple(m) => write!(f, "({})", join(m)),
        }
    }
}

/// The statistical property a query asks about. Together with a [`Query`] it
/// forms the textual query grammar
/// `ci:a,b|c1,c2` · `anm:i->j` · `dir:i->j` · `corr:a,b` · `sign:a,b` · `lingam:t1,t2,...`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Property {
    Ci,
    Anm,
    Dir,
    Corr,
    Sign,
    Lingam,
}

impl Property {
    pub fn prefix(self) -> &'static str {
        match self {
            Property::Ci => "ci",
            Property::Anm => "anm",
            Property::Dir => "dir",
            Property::Corr => "corr",
            Property::Sign => "sign",
            Property::Lingam => "lingam",
        }
    }

    pub fn query_kind(self) -> QueryKind {
        match self {
            Property::Ci => QueryKind::CondIndep,
            Property::Anm | Property::Dir => QueryKind::OrderedPair,
            Property::Corr | Property::Sign => QueryKind::UnorderedPair,
            Property::Lingam => QueryKind::OrderedTuple,
        }
    }
}

/// A parsed query string: property plus canonical query.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct PropertyQuery {
    pub property: Property,
    pub query: Query,
}

fn parse_ids(s: &str) -> Result<Vec<VarId>> {
    let s = s.trim();
    if s.is_empty() {
        return Ok(Vec::new());
    }
    s.split(',')
        .map(|t| {
            t.trim()
                .parse::<VarId>()
                .map_err(|_| Error::Parse(format!("not a variable id: {t:?}")))
        })
        .collect()
}

fn parse_arrow(s: &str) -> Result<(VarId, VarId)> {
    let (a, b) = s
        .split_once("->")
        .ok_or_else(|| Error::Parse(format!("expected `i->j`, got {s:?}")))?;
    let ids = parse_ids(&format!("{a},{b}"))?;
    Ok((ids[0], ids[1]))
}

fn parse_pair(s: &str) -> Result<(VarId, VarId)> {
    match parse_ids(s)?.as_slice() {
        [a, b] => Ok((*a, *b)),
        _ => Err(Error::Parse(format!("expected two variables, got {s:?}"))),
    }
}

impl FromStr for PropertyQuery {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let (prefix, body) = s
            .split_once(':')
            .ok_or_else(|| Error::Parse(format!("missing `<property>:` prefix in {s:?}")))?;
        let property = match prefix.trim() {
            "ci" => Property::Ci,
            "anm" => Property::Anm,
            "dir" => Property::Dir,
            "corr" => Property::Corr,
            "sign" => Property::Sign,
            "lingam" => Property::Lingam,
            other => return Err(Error::Parse(format!("unknown property {other:?}"))),
        };
        let query = match property {
            Property::Ci => {
                let (pair, cond) = body.split_once('|').unwrap_or((body, ""));
                let (a, b) = parse_pair(pair)?;
                Query::cond_indep(a, b, parse_ids(cond)?)?
            }
            Property::Anm | Property::Dir => {
                let (i, j) = parse_arrow(body)?;
                Query::ordered_pair(i, j)?
            }
            Property::Corr | Property::Sign => {
                let (a, b) = parse_pair(body)?;
                Query::unordered_pair(a, b)?
            }
            Property::Lingam => Query::ordered_tuple(parse_ids(body)?)?,
        };
        Ok(PropertyQuery { property, query })
    }
}

impl fmt::Display for PropertyQuery {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let p = self.property.prefix();
        match &self.query {
            Query::CondIndep { .. } => write!(f, "{}", self.query),
            Query::OrderedPair { source, target } => write!(f, "{p}:{source}->{target}"),
            Query::UnorderedPair(a, b) => write!(f, "{p}:{a},{b}"),
            Query::OrderedTuple(m) => {
                let m: Vec<String> = m.iter().map(|x| x.to_string()).collect();
                write!(f, "{p}:{}", m.join(","))
            }
        }
    }
}

fn combinations(items: &[VarId], k: usize, out: &mut Vec<Vec<VarId>>) {
    fn rec(items: &[VarId], k: usize, start: usize, cur: &mut Vec<VarId>, out: &mut Vec<Vec<VarId>>) {
        if cur.len() == k {
            out.push(cur.clone());
            return;
        }
        let need = k - cur.len();
        for i in start..=items.len().saturating_sub(need) {
            if i >= items.len() {
                break;
            }
            cur.push(items[i]);
            rec(items, k, i + 1, cur, out);
            cur.pop();
        }
    }
    rec(items, k, 0, &mut Vec::with_capacity(k), out);
}

/// All `k`-subsets of `items`, in lexicographic order of positions.
pub fn subsets(items: &[VarId], k: usize) -> Vec<Vec<VarId>> {
    let mut out = Vec::new();
    if k <= items.len() {
        combinations(items, k, &mut out);
    }
    out
}

fn permutations_of_len(n: usize, len: usize) -> Vec<Vec<VarId>> {
    fn rec(n: usize, len: usize, used: &mut [bool], cur: &mut Vec<VarId>, out: &mut Vec<Vec<VarId>>) {
        if cur.len() == len {
            out.push(cur.clone());
            return;
        }
        for v in 0..n {
            if !used[v] {
                used[v] = true;
                cur.push(v);
                rec(n, len, used, cur, out);
                cur.pop();
                used[v] = false;
            }
        }
    }
    let mut out = Vec::new();
    rec(n, len, &mut vec![false; n], &mut Vec::with_capacity(len), &mut out);
    out
}

/// Exhaustive, duplicate-free list of canonical queries over `0..n`.
///
/// `size` is the conditioning-set size for [`QueryKind::CondIndep`], the tuple
/// length for [`QueryKind::OrderedTuple`], and ignored for pairs.
pub fn enumerate_queries(n: usize, kind: QueryKind, size: usize) -> Result<Vec<Query>> {
    crate::bounds::count_queries(n, kind, size)?;
    let mut out = Vec::new();
    match kind {
        QueryKind::CondIndep => {
            for a in 0..n {
                for b in a + 1..n {
                    let rest: Vec<VarId> = (0..n).filter(|&v| v != a && v != b).collect();
                    for cond in subsets(&rest, size) {
                        out.push(Query::CondIndep { pair: (a, b), cond });
                    }
                }
            }
        }
        QueryKind::OrderedPair => {
            for source in 0..n {
                for target in 0..n {
                    if source != target {
                        out.push(Query::OrderedPair { source, target });
                    }
                }
            }
        }
        QueryKind::UnorderedPair => {
            for a in 0..n {
                for b in a + 1..n {
                    out.push(Query::UnorderedPair(a, b));
                }
            }
        }
        QueryKind::OrderedTuple => {
            out.extend(permutations_of_len(n, size).into_iter().map(Query::OrderedTuple));
        }
    }
    Ok(out)
}

/// `k` distinct queries drawn uniformly without replacement.
pub fn sample_queries(universe: &[Query], k: usize, seed: u64) -> Result<Vec<Query>> {
    if k == 0 || k > universe.len() {
        return Err(Error::KTooLarge { k, universe: universe.len() });
    }
    let mut r = rng::rng(seed);
    Ok(index::sample(&mut r, universe.len(), k)
        .into_iter()
        .map(|i| universe[i].clone())
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;
    use std::collections::HashSet;

    #[test]
    fn enumerate_counts() {
        assert_eq!(enumerate_queries(4, QueryKind::CondIndep, 1).unwrap().len(), 12);
        assert_eq!(enumerate_queries(3, QueryKind::UnorderedPair, 0).unwrap().len(), 3);
        assert!(matches!(
            enumerate_queries(2, QueryKind::CondIndep, 1),
            Err(Error::InvalidSize(_))
        ));
    }

    #[test]
    fn enumeration_matches_closed_form() {
        for n in 2..=12 {
            for kind in [QueryKind::CondIndep, QueryKind::OrderedPair, QueryKind::UnorderedPair] {
                for size in 0..=2 {
                    if kind == QueryKind::CondIndep && size + 2 > n {
                        continue;
                    }
                    let qs = enumerate_queries(n, kind, size).unwrap();
                    let count = crate::bounds::count_queries(n, kind, size).unwrap();
                    assert_eq!(qs.len() as u64, count, "n={n} {kind:?} {size}");
                    let set: HashSet<_> = qs.iter().collect();
                    assert_eq!(set.len(), qs.len());
                    assert!(qs.iter().all(|q| q.canonical() == *q));
                }
            }
        }
        assert_eq!(enumerate_queries(4, QueryKind::OrderedTuple, 3).unwrap().len(), 24);
    }

    #[test]
    fn sample_full_universe_is_permutation() {
        let u = enumerate_queries(5, QueryKind::CondIndep, 1).unwrap();
        let mut s = sample_queries(&u, u.len(), 3).unwrap();
        s.sort();
        let mut sorted = u.clone();
        sorted.sort();
        assert_eq!(s, sorted);
        assert_eq!(sample_queries(&u, 7, 11).unwrap(), sample_queries(&u, 7, 11).unwrap());
        assert!(matches!(sample_queries(&u, u.len() + 1, 0), Err(Error::KTooLarge { .. })));
    }

    #[test]
    fn sampling_is_uniform() {
        // Two independent uniform 100-subsets of 360 overlap in 100*100/360 ≈ 27.8 on average.
        let u = enumerate_queries(10, QueryKind::CondIndep, 1).unwrap();
        assert_eq!(u.len(), 360);
        let trials = 400;
        let mut total = 0usize;
        for s in 0..trials {
            let a: HashSet<_> = sample_queries(&u, 100, 2 * s).unwrap().into_iter().collect();
            let b = sample_queries(&u, 100, 2 * s + 1).unwrap();
            total += b.iter().filter(|q| a.contains(q)).count();
        }
        let mean = total as f64 / trials as f64;
        let expected = 100.0 * 100.0 / 360.0;
        // hypergeometric sd ≈ 3.9, standard error of the mean ≈ 0.2
        assert!((mean - expected).abs() < 1.0, "mean overlap {mean}");
    }

    #[test]
    fn parse_grammar() {
        let q: PropertyQuery = "ci:4,1|5,2".parse().unwrap();
        assert_eq!(q.query, Query::CondIndep { pair: (1, 4), cond: vec![2, 5] });
        assert_eq!(q.to_string(), "ci:1,4|2,5");
        let q: PropertyQuery = "ci:0,2|".parse().unwrap();
        assert_eq!(q.query, Query::CondIndep { pair: (0, 2), cond: vec![] });
        let q: PropertyQuery = "anm:3->5".parse().unwrap();
        assert_eq!(q.property, Property::Anm);
        assert_eq!(q.query, Query::OrderedPair { source: 3, target: 5 });
        let q: PropertyQuery = "corr:6,2".parse().unwrap();
        assert_eq!(q.query, Query::UnorderedPair(2, 6));
        let q: PropertyQuery = "lingam:2,0,1".parse().unwrap();
        assert_eq!(q.query, Query::OrderedTuple(vec![2, 0, 1]));
        assert!("ci:1,1|".parse::<PropertyQuery>().is_err());
        assert!("ci:1,2|1".parse::<PropertyQuery>().is_err());
        assert!("foo:1,2".parse::<PropertyQuery>().is_err());
        assert!(matches!("foo:1,2".parse::<PropertyQuery>(), Err(Error::Parse(_))));
        assert!("anm:1,2".parse::<PropertyQuery>().is_err());
    }

    proptest! {
        #[test]
        fn canonical_is_idempotent_and_symmetric(
            a in 0usize..20, b in 0usize..20, cond in proptest::collection::vec(0usize..20, 0..4)
        ) {
            let q = Query::CondIndep { pair: (a, b), cond: cond.clone() };
            prop_assert_eq!(q.canonical().canonical(), q.canonical());
            let mut rev = cond.clone();
            rev.reverse();
            let swapped = Query::CondIndep { pair: (b, a), cond: rev };
            prop_assert_eq!(q.canonical(), swapped.canonical());
            let u = Query::UnorderedPair(a, b);
            prop_assert_eq!(u.canonical(), Query::UnorderedPair(b, a).canonical());
        }

        #[test]
        fn display_parse_roundtrip(a in 0usize..30, b in 0usize..30, c in 0usize..30) {
            prop_assume!(a != b && b != c && a != c);
            let q = PropertyQuery { property: Property::Ci, query: Query::cond_indep(a, b, vec![c]).unwrap() };
            prop_assert_eq!(q.to_string().parse::<PropertyQuery>().unwrap(), q);
        }
    }
}
