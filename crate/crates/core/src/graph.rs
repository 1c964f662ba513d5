//! Directed acyclic graphs: construction, exhaustive enumeration, and
//! Markov-equivalence tests.
//!
//! Nodes are indexed from 0 internally. Text interfaces (edge-list files,
//! reports) number nodes from 1; conversion happens at those boundaries.

use crate::error::{Error, Result};
use crate::exec;
use std::collections::BTreeSet;

/// Hard cap on exhaustive DAG enumeration; the labeled-DAG count grows
/// superexponentially (29281 graphs already at five nodes).
pub const MAX_ENUMERATION_NODES: usize = 5;

/// A directed acyclic graph with per-node parent sets.
///
/// Immutable after construction, so shared references can be scored
/// concurrently.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Dag {
    n: usize,
    parents: Vec<Vec<usize>>,
    children: Vec<Vec<usize>>,
}

impl Dag {
    /// Builds a DAG on `n` nodes from `(parent, child)` edges.
    ///
    /// Rejects self-loops, out-of-range indices, duplicate edges
    /// (`Error::InvalidEdge`) and directed cycles (`Error::Cycle`).
    pub fn new(n: usize, edges: &[(usize, usize)]) -> Result<Self> {
        if n == 0 {
            return Err(Error::Domain("a graph needs at least one node".into()));
        }
        let mut parents = vec![Vec::new(); n];
        let mut children = vec![Vec::new(); n];
        for &(p, c) in edges {
            if p >= n || c >= n {
                return Err(Error::InvalidEdge {
                    parent: p,
                    child: c,
                    reason: "node index out of range",
                });
            }
            if p == c {
                return Err(Error::InvalidEdge {
                    parent: p,
                    child: c,
                    reason: "self-loop",
                });
            }
            if parents[c].contains(&p) {
                return Err(Error::InvalidEdge {
                    parent: p,
                    child: c,
                    reason: "duplicate edge",
                });
            }
            parents[c].push(p);
            children[p].push(c);
        }
        for list in parents.iter_mut().chain(children.iter_mut()) {
            list.sort_unstable();
        }
        let dag = Dag {
            n,
            parents,
            children,
        };
        if dag.topological_order().is_none() {
            return Err(Error::Cycle);
        }
        Ok(dag)
    }

    /// The edgeless graph on `n` nodes.
    pub fn empty(n: usize) -> Result<Self> {
        Dag::new(n, &[])
    }

    pub fn node_count(&self) -> usize {
        self.n
    }

    /// Sorted parent indices of `node`.
    pub fn parents(&self, node: usize) -> &[usize] {
        &self.parents[node]
    }

    /// Sorted child indices of `node`.
    pub fn children(&self, node: usize) -> &[usize] {
        &self.children[node]
    }

    /// True if `node` has at least one parent or child.
    pub fn is_connected(&self, node: usize) -> bool {
        !self.parents[node].is_empty() || !self.children[node].is_empty()
    }

    /// All edges as `(parent, child)` pairs, sorted.
    pub fn edges(&self) -> Vec<(usize, usize)> {
        let mut out = Vec::new();
        for c in 0..self.n {
            for &p in &self.parents[c] {
                out.push((p, c));
            }
        }
        out.sort_unstable();
        out
    }

    pub fn edge_count(&self) -> usize {
        self.parents.iter().map(Vec::len).sum()
    }

    pub fn has_edge(&self, parent: usize, child: usize) -> bool {
        self.parents[child].binary_search(&parent).is_ok()
    }

    /// The lexicographically smallest topological order, or `None` if the
    /// graph (as stored) contains a cycle.
    pub fn topological_order(&self) -> Option<Vec<usize>> {
        let mut indegree: Vec<usize> = self.parents.iter().map(Vec::len).collect();
        // BTreeSet keeps the frontier sorted so the order is canonical.
        let mut ready: BTreeSet<usize> = (0..self.n).filter(|&i| indegree[i] == 0).collect();
        let mut order = Vec::with_capacity(self.n);
        while let Some(&next) = ready.iter().next() {
            ready.remove(&next);
            order.push(next);
            for &c in &self.children[next] {
                indegree[c] -= 1;
                if indegree[c] == 0 {
                    ready.insert(c);
                }
            }
        }
        (order.len() == self.n).then_some(order)
    }

    /// Number of joint value configurations of `node`'s parents. Defined as
    /// 1 for a parentless node (the single empty configuration).
    pub fn parent_config_count(&self, node: usize, cards: &[u32]) -> u64 {
        self.parents[node]
            .iter()
            .map(|&p| u64::from(cards[p]))
            .product()
    }

    /// Adjacency bitmask with bit `parent * n + child` set per edge; the
    /// canonical enumeration sorts ascending by this value.
    pub fn adjacency_mask(&self) -> u64 {
        let mut mask = 0u64;
        for (p, c) in self.edges() {
            mask |= 1 << (p * self.n + c);
        }
        mask
    }

    fn from_pair_mask(n: usize, pairs: &[(usize, usize)], mask: u32) -> Self {
        let mut parents = vec![Vec::new(); n];
        let mut children = vec![Vec::new(); n];
        for (bit, &(p, c)) in pairs.iter().enumerate() {
            if mask >> bit & 1 == 1 {
                parents[c].push(p);
                children[p].push(c);
            }
        }
        for list in parents.iter_mut().chain(children.iter_mut()) {
            list.sort_unstable();
        }
        Dag {
            n,
            parents,
            children,
        }
    }
}

/// Observational signature of a DAG: undirected skeleton plus v-structures.
/// Two DAGs encode the same conditional-independence relations exactly when
/// these coincide.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct EquivalenceKey {
    /// Undirected edges, endpoints sorted.
    pub skeleton: BTreeSet<(usize, usize)>,
    /// Triples `(a, c, b)` with `a -> c <- b`, `a < b`, and `a`,`b`
    /// non-adjacent.
    pub v_structures: BTreeSet<(usize, usize, usize)>,
}

/// Computes the skeleton + v-structure signature of `dag`.
pub fn equivalence_key(dag: &Dag) -> EquivalenceKey {
    let mut skeleton = BTreeSet::new();
    for (p, c) in dag.edges() {
        skeleton.insert((p.min(c), p.max(c)));
    }
    let mut v_structures = BTreeSet::new();
    for c in 0..dag.node_count() {
        let ps = dag.parents(c);
        for (x, &a) in ps.iter().enumerate() {
            for &b in &ps[x + 1..] {
                let adjacent = skeleton.contains(&(a.min(b), a.max(b)));
                if !adjacent {
                    v_structures.insert((a, c, b));
                }
            }
        }
    }
    EquivalenceKey {
        skeleton,
        v_structures,
    }
}

/// True iff the two DAGs are Markov equivalent (same skeleton and
/// v-structures).
pub fn markov_equivalent(d1: &Dag, d2: &Dag) -> Result<bool> {
    if d1.node_count() != d2.node_count() {
        return Err(Error::SizeMismatch(format!(
            "graphs have {} and {} nodes",
            d1.node_count(),
            d2.node_count()
        )));
    }
    Ok(equivalence_key(d1) == equivalence_key(d2))
}

/// Enumerates every labeled DAG on `n` nodes in canonical order (ascending
/// adjacency bitmask). Capped at [`MAX_ENUMERATION_NODES`].
pub fn enumerate_dags(n: usize) -> Result<Vec<Dag>> {
    if n == 0 {
        return Err(Error::Domain("a graph needs at least one node".into()));
    }
    if n > MAX_ENUMERATION_NODES {
        return Err(Error::TooLarge {
            what: "node count for DAG enumeration",
            value: n,
            max: MAX_ENUMERATION_NODES,
        });
    }
    // Ordered node pairs, row-major. Iterating the pair mask in increasing
    // order visits graphs in increasing adjacency-mask order because the
    // skipped diagonal bits are always zero.
    let pairs: Vec<(usize, usize)> = (0..n)
        .flat_map(|p| (0..n).filter(move |&c| c != p).map(move |c| (p, c)))
        .collect();
    let total = 1usize << pairs.len();
    Ok(exec::filter_map_range(total, |mask| {
        let mask = mask as u32;
        pair_mask_is_acyclic(n, &pairs, mask).then(|| Dag::from_pair_mask(n, &pairs, mask))
    }))
}

/// Kahn-style acyclicity check on a packed edge mask, allocation-light so the
/// full 2^(n(n-1)) sweep stays cheap.
fn pair_mask_is_acyclic(n: usize, pairs: &[(usize, usize)], mask: u32) -> bool {
    let mut indegree = [0u8; MAX_ENUMERATION_NODES];
    let mut child_bits = [0u8; MAX_ENUMERATION_NODES];
    for (bit, &(p, c)) in pairs.iter().enumerate() {
        if mask >> bit & 1 == 1 {
            indegree[c] += 1;
            child_bits[p] |= 1 << c;
        }
    }
    let mut removed = 0;
    let mut live: u8 = ((1u16 << n) - 1) as u8;
    loop {
        let mut progressed = false;
        for i in 0..n {
            if live >> i & 1 == 1 && indegree[i] == 0 {
                live &= !(1 << i);
                removed += 1;
                progressed = true;
                let mut bits = child_bits[i];
                while bits != 0 {
                    indegree[bits.trailing_zeros() as usize] -= 1;
                    bits &= bits - 1;
                }
            }
        }
        if !progressed {
            return removed == n;
        }
    }
}

/// Parses an edge-list text: one `parent child` pair of 1-based integers per
/// line. Blank lines and `#` comments are skipped.
pub fn parse_edge_list(text: &str, n: usize) -> Result<Dag> {
    let mut edges = Vec::new();
    for (idx, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let mut it = line.split_whitespace();
        let parse = |tok: Option<&str>| -> Result<usize> {
            let tok = tok.ok_or_else(|| Error::Parse {
                line: idx + 1,
                msg: "expected `parent child`".into(),
            })?;
            let v: usize = tok.parse().map_err(|_| Error::Parse {
                line: idx + 1,
                msg: format!("`{tok}` is not an integer"),
            })?;
            if v == 0 {
                return Err(Error::Parse {
                    line: idx + 1,
                    msg: "node indices are numbered from 1".into(),
                });
            }
            Ok(v - 1)
        };
        let p = parse(it.next())?;
        let c = parse(it.next())?;
        if it.next().is_some() {
            return Err(Error::Parse {
                line: idx + 1,
                msg: "expected exactly two integers".into(),
            });
        }
        edges.push((p, c));
    }
    Dag::new(n, &edges)
}
