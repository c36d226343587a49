//! Structural bottleneck extraction on undirected networks.
//!
//! Three problem families, each as a greedy heuristic paired with an exact
//! enumerator for small instances:
//!
//! * maximum-leaf spanning tree — the internal (non-leaf) nodes are the
//!   structural bottleneck set;
//! * minimum connected dominating set — equivalently the complement of the
//!   maximum leaf set for graphs with at least three nodes;
//! * two-level network design — a primary path plus minimum-cost secondary
//!   attachment trees.
//!
//! Everything is deterministic for a fixed input: node identifiers order
//! lexicographically, and every tie documented below breaks toward the
//! smallest id (or the earliest candidate in a canonical enumeration).

use std::collections::BTreeSet;

use serde::{Deserialize, Serialize};

use crate::model::Graph;
use crate::scalar::Scalar;

/// Default node cap for the exact spanning-tree / dominating-set searches.
pub const DEFAULT_EXACT_LIMIT: usize = 10;
/// Default node cap for the exact two-level design search.
pub const DEFAULT_HTND_EXACT_LIMIT: usize = 8;
/// Hard cap for the subset bitmasks used by the exact searches.
const MASK_CAP: usize = 24;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum NetError {
    #[error("graph must have at least {needed} nodes, found {found}")]
    TooFewNodes { needed: usize, found: usize },
    #[error("graph is not connected")]
    Disconnected,
    #[error("{n} nodes exceed the exact-search limit {limit}")]
    TooLarge { n: usize, limit: usize },
    #[error("edge ({0:?}, {1:?}) is missing a primary or secondary cost")]
    MissingCost(String, String),
    #[error("edge ({0:?}, {1:?}) has secondary cost above primary cost")]
    CostOrder(String, String),
    #[error("invalid graph: {0}")]
    InvalidGraph(String),
}

/// A spanning tree with its leaf/internal split. A node of tree-degree 1 is
/// a leaf even when it is the root, so `leaves ∪ internal` always covers the
/// node set exactly.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SpanningTreeResult {
    pub edges: Vec<(String, String)>,
    pub leaves: BTreeSet<String>,
    pub internal: BTreeSet<String>,
    pub root: String,
    /// Tree degree per node id, reported as auxiliary severity data.
    pub degrees: Vec<(String, usize)>,
}

impl SpanningTreeResult {
    pub fn leaf_count(&self) -> usize {
        self.leaves.len()
    }
}

/// A two-level spanning design: one simple primary path, secondary trees
/// attaching every remaining node, and the summed cost.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TwoLevelDesign<S> {
    /// Path order; the first id is lexicographically at most the last.
    pub primary_nodes: Vec<String>,
    pub primary_edges: Vec<(String, String)>,
    pub secondary_edges: Vec<(String, String)>,
    pub total_cost: S,
}

/// Index-compiled view of a graph: nodes sorted by id so that index order is
/// id order, adjacency sorted ascending.
struct Compiled<S> {
    ids: Vec<String>,
    adj: Vec<Vec<usize>>,
    edges: Vec<(usize, usize, Option<S>, Option<S>)>,
}

impl<S: Scalar> Compiled<S> {
    fn new(graph: &Graph<S>, min_nodes: usize) -> Result<Self, NetError> {
        let report = graph.validate();
        if let Some(v) = report.first() {
            return Err(NetError::InvalidGraph(v.to_string()));
        }
        if graph.nodes.len() < min_nodes {
            return Err(NetError::TooFewNodes {
                needed: min_nodes,
                found: graph.nodes.len(),
            });
        }
        let mut ids: Vec<String> = graph.nodes.clone();
        ids.sort();
        let index_of = |id: &str| ids.binary_search_by(|x| x.as_str().cmp(id)).unwrap();
        let mut adj = vec![Vec::new(); ids.len()];
        let mut edges = Vec::with_capacity(graph.edges.len());
        for e in &graph.edges {
            let (mut u, mut v) = (index_of(&e.a), index_of(&e.b));
            if u > v {
                std::mem::swap(&mut u, &mut v);
            }
            adj[u].push(v);
            adj[v].push(u);
            edges.push((u, v, e.primary_cost, e.secondary_cost));
        }
        for nbrs in &mut adj {
            nbrs.sort_unstable();
        }
        edges.sort_by_key(|a| (a.0, a.1));
        let compiled = Self { ids, adj, edges };
        if !compiled.is_connected() {
            return Err(NetError::Disconnected);
        }
        Ok(compiled)
    }

    fn n(&self) -> usize {
        self.ids.len()
    }

    fn is_connected(&self) -> bool {
        if self.ids.is_empty() {
            return true;
        }
        let mut seen = vec![false; self.n()];
        let mut stack = vec![0usize];
        seen[0] = true;
        let mut count = 1;
        while let Some(u) = stack.pop() {
            for &v in &self.adj[u] {
                if !seen[v] {
                    seen[v] = true;
                    count += 1;
                    stack.push(v);
                }
            }
        }
        count == self.n()
    }

    /// Closed-neighborhood bitmask per node.
    fn closed_masks(&self) -> Vec<u32> {
        (0..self.n())
            .map(|v| {
                let mut m = 1u32 << v;
                for &u in &self.adj[v] {
                    m |= 1 << u;
                }
                m
            })
            .collect()
    }

    fn induced_connected(&self, members: &[usize]) -> bool {
        if members.is_empty() {
            return false;
        }
        let inside: Vec<bool> = {
            let mut f = vec![false; self.n()];
            for &m in members {
                f[m] = true;
            }
            f
        };
        let mut seen = vec![false; self.n()];
        let mut stack = vec![members[0]];
        seen[members[0]] = true;
        let mut count = 1;
        while let Some(u) = stack.pop() {
            for &v in &self.adj[u] {
                if inside[v] && !seen[v] {
                    seen[v] = true;
                    count += 1;
                    stack.push(v);
                }
            }
        }
        count == members.len()
    }

    /// Greedy connected dominating growth: seed with the node covering the
    /// most nodes, then repeatedly add the frontier node covering the most
    /// still-uncovered nodes. Ties break toward the smallest id.
    fn greedy_connected_dominators(&self) -> Vec<usize> {
        let n = self.n();
        let mut covered = vec![false; n];
        let mut in_set = vec![false; n];
        let mut chosen = Vec::new();
        // Nothing is covered yet, so the seed gain is the closed
        // neighborhood size.
        let seed = (0..n)
            .max_by(|&a, &b| {
                (self.adj[a].len() + 1)
                    .cmp(&(self.adj[b].len() + 1))
                    .then(b.cmp(&a))
            })
            .expect("at least one node");
        chosen.push(seed);
        in_set[seed] = true;
        covered[seed] = true;
        for &u in &self.adj[seed] {
            covered[u] = true;
        }
        while covered.iter().any(|&c| !c) {
            let mut best: Option<(usize, usize)> = None;
            for &member in &chosen {
                for &cand in &self.adj[member] {
                    if in_set[cand] {
                        continue;
                    }
                    let g = self.adj[cand].iter().filter(|&&u| !covered[u]).count();
                    let better = match best {
                        None => true,
                        Some((bg, bi)) => g > bg || (g == bg && cand < bi),
                    };
                    if better {
                        best = Some((g, cand));
                    }
                }
            }
            let (_, pick) = best.expect("connected graph always exposes a frontier");
            chosen.push(pick);
            in_set[pick] = true;
            covered[pick] = true;
            for &u in &self.adj[pick] {
                covered[u] = true;
            }
        }
        chosen
    }

    /// Spanning tree from an internal-node set: BFS tree over the induced
    /// set from its smallest member, then every remaining node attaches to
    /// its smallest internal neighbor.
    fn tree_from_internal(&self, internal: &[usize]) -> SpanningTreeResult {
        let n = self.n();
        let mut edges: Vec<(usize, usize)> = Vec::with_capacity(n.saturating_sub(1));
        let inside: Vec<bool> = {
            let mut f = vec![false; n];
            for &m in internal {
                f[m] = true;
            }
            f
        };
        let root = internal.iter().copied().min().unwrap_or(0);
        if !internal.is_empty() {
            let mut seen = vec![false; n];
            seen[root] = true;
            let mut queue = std::collections::VecDeque::from([root]);
            while let Some(u) = queue.pop_front() {
                for &v in &self.adj[u] {
                    if inside[v] && !seen[v] {
                        seen[v] = true;
                        edges.push((u.min(v), u.max(v)));
                        queue.push_back(v);
                    }
                }
            }
        }
        for v in 0..n {
            if inside[v] || (internal.is_empty() && v == root) {
                continue;
            }
            let host = if internal.is_empty() {
                root
            } else {
                *self.adj[v]
                    .iter()
                    .find(|&&u| inside[u])
                    .expect("internal set dominates the graph")
            };
            edges.push((host.min(v), host.max(v)));
        }
        edges.sort_unstable();
        let mut degree = vec![0usize; n];
        for &(u, v) in &edges {
            degree[u] += 1;
            degree[v] += 1;
        }
        let mut leaves = BTreeSet::new();
        let mut internal_out = BTreeSet::new();
        for (v, &deg) in degree.iter().enumerate() {
            if deg >= 2 {
                internal_out.insert(self.ids[v].clone());
            } else {
                leaves.insert(self.ids[v].clone());
            }
        }
        SpanningTreeResult {
            edges: edges
                .into_iter()
                .map(|(u, v)| (self.ids[u].clone(), self.ids[v].clone()))
                .collect(),
            leaves,
            internal: internal_out,
            root: self.ids[root].clone(),
            degrees: (0..n).map(|v| (self.ids[v].clone(), degree[v])).collect(),
        }
    }
}

/// Visit size-`k` index subsets of `0..n` in lexicographic order until the
/// callback returns `true`; reports whether any call did.
fn any_subset_of_size(n: usize, k: usize, mut f: impl FnMut(&[usize]) -> bool) -> bool {
    if k > n {
        return false;
    }
    if k == 0 {
        return f(&[]);
    }
    let mut subset: Vec<usize> = (0..k).collect();
    loop {
        if f(&subset) {
            return true;
        }
        let mut advanced = false;
        for i in (0..k).rev() {
            if subset[i] < n - (k - i) {
                subset[i] += 1;
                for j in i + 1..k {
                    subset[j] = subset[j - 1] + 1;
                }
                advanced = true;
                break;
            }
        }
        if !advanced {
            return false;
        }
    }
}

/// Greedy maximum-leaf spanning tree: grow a connected dominating internal
/// set by maximum coverage, then hang every remaining node off it as a leaf.
pub fn mlst_heuristic<S: Scalar>(graph: &Graph<S>) -> Result<SpanningTreeResult, NetError> {
    let compiled = Compiled::new(graph, 2)?;
    if compiled.n() == 2 {
        return Ok(compiled.tree_from_internal(&[]));
    }
    let internal = compiled.greedy_connected_dominators();
    Ok(compiled.tree_from_internal(&internal))
}

/// Exact maximum-leaf spanning tree via exhaustive search over internal-set
/// candidates of increasing size (default node cap
/// [`DEFAULT_EXACT_LIMIT`]).
pub fn mlst_exact<S: Scalar>(graph: &Graph<S>) -> Result<SpanningTreeResult, NetError> {
    mlst_exact_with_limit(graph, DEFAULT_EXACT_LIMIT)
}

pub fn mlst_exact_with_limit<S: Scalar>(
    graph: &Graph<S>,
    limit: usize,
) -> Result<SpanningTreeResult, NetError> {
    let compiled = Compiled::new(graph, 2)?;
    let n = compiled.n();
    if n > limit.min(MASK_CAP) {
        return Err(NetError::TooLarge {
            n,
            limit: limit.min(MASK_CAP),
        });
    }
    if n == 2 {
        return Ok(compiled.tree_from_internal(&[]));
    }
    let masks = compiled.closed_masks();
    let full = if n == 32 { u32::MAX } else { (1u32 << n) - 1 };
    for k in 1..=n {
        let mut found: Option<Vec<usize>> = None;
        any_subset_of_size(n, k, |subset| {
            let covered = subset.iter().fold(0u32, |m, &v| m | masks[v]);
            if covered == full && compiled.induced_connected(subset) {
                found = Some(subset.to_vec());
                true
            } else {
                false
            }
        });
        if let Some(internal) = found {
            return Ok(compiled.tree_from_internal(&internal));
        }
    }
    unreachable!("a connected graph is dominated by its full node set")
}

/// Greedy connected dominating set (maximum new coverage per step, ties to
/// the smallest id).
pub fn cds_heuristic<S: Scalar>(graph: &Graph<S>) -> Result<BTreeSet<String>, NetError> {
    let compiled = Compiled::new(graph, 2)?;
    Ok(compiled
        .greedy_connected_dominators()
        .into_iter()
        .map(|v| compiled.ids[v].clone())
        .collect())
}

/// Exact minimum connected dominating set by subset enumeration in
/// increasing size, lexicographic within a size.
pub fn cds_exact<S: Scalar>(graph: &Graph<S>) -> Result<BTreeSet<String>, NetError> {
    cds_exact_with_limit(graph, DEFAULT_EXACT_LIMIT)
}

pub fn cds_exact_with_limit<S: Scalar>(
    graph: &Graph<S>,
    limit: usize,
) -> Result<BTreeSet<String>, NetError> {
    let compiled = Compiled::new(graph, 2)?;
    let n = compiled.n();
    if n > limit.min(MASK_CAP) {
        return Err(NetError::TooLarge {
            n,
            limit: limit.min(MASK_CAP),
        });
    }
    let masks = compiled.closed_masks();
    let full = if n == 32 { u32::MAX } else { (1u32 << n) - 1 };
    for k in 1..=n {
        let mut found: Option<Vec<usize>> = None;
        any_subset_of_size(n, k, |subset| {
            let covered = subset.iter().fold(0u32, |m, &v| m | masks[v]);
            if covered == full && compiled.induced_connected(subset) {
                found = Some(subset.to_vec());
                true
            } else {
                false
            }
        });
        if let Some(members) = found {
            return Ok(members
                .into_iter()
                .map(|v| compiled.ids[v].clone())
                .collect());
        }
    }
    unreachable!("the full node set of a connected graph dominates it")
}

/// Check the exchange identity between the two exact searches: the minimum
/// connected dominating set size equals the node count minus the maximum
/// leaf count. Holds for every connected graph with at least three nodes.
pub fn mlst_cds_identity_check<S: Scalar>(
    graph: &Graph<S>,
    limit: usize,
) -> Result<bool, NetError> {
    if graph.nodes.len() < 3 {
        return Err(NetError::TooFewNodes {
            needed: 3,
            found: graph.nodes.len(),
        });
    }
    let tree = mlst_exact_with_limit(graph, limit)?;
    let cds = cds_exact_with_limit(graph, limit)?;
    Ok(cds.len() == graph.nodes.len() - tree.leaf_count())
}

struct CostedGraph<S> {
    compiled: Compiled<S>,
    primary: Vec<S>,
    secondary: Vec<S>,
    /// Edge indices sorted by (secondary cost, edge index).
    by_secondary: Vec<usize>,
}

impl<S: Scalar> CostedGraph<S> {
    fn new(graph: &Graph<S>) -> Result<Self, NetError> {
        let compiled = Compiled::new(graph, 2)?;
        let mut primary = Vec::with_capacity(compiled.edges.len());
        let mut secondary = Vec::with_capacity(compiled.edges.len());
        for &(u, v, p, s) in &compiled.edges {
            let (p, s) = match (p, s) {
                (Some(p), Some(s)) => (p, s),
                _ => {
                    return Err(NetError::MissingCost(
                        compiled.ids[u].clone(),
                        compiled.ids[v].clone(),
                    ))
                }
            };
            if s > p {
                return Err(NetError::CostOrder(
                    compiled.ids[u].clone(),
                    compiled.ids[v].clone(),
                ));
            }
            primary.push(p);
            secondary.push(s);
        }
        let mut by_secondary: Vec<usize> = (0..compiled.edges.len()).collect();
        by_secondary.sort_by(|&a, &b| {
            secondary[a]
                .partial_cmp(&secondary[b])
                .unwrap_or(std::cmp::Ordering::Equal)
                .then(a.cmp(&b))
        });
        Ok(Self {
            compiled,
            primary,
            secondary,
            by_secondary,
        })
    }

    fn edge_index(&self, u: usize, v: usize) -> usize {
        let key = (u.min(v), u.max(v));
        self.compiled
            .edges
            .binary_search_by(|e| (e.0, e.1).cmp(&key))
            .expect("edge exists")
    }

    /// Cheapest secondary forest attaching every node outside `path` once
    /// the path is contracted to a single terminal. Kruskal over secondary
    /// costs; edges with both ends on the path are unusable (they would
    /// close a cycle with the primary path).
    fn secondary_attachment(&self, path: &[usize]) -> (S, Vec<usize>) {
        let n = self.compiled.n();
        let mut parent: Vec<usize> = (0..n).collect();
        fn find(parent: &mut [usize], x: usize) -> usize {
            let mut root = x;
            while parent[root] != root {
                root = parent[root];
            }
            let mut cur = x;
            while parent[cur] != root {
                let next = parent[cur];
                parent[cur] = root;
                cur = next;
            }
            root
        }
        for &v in &path[1..] {
            let (ra, rb) = (find(&mut parent, path[0]), find(&mut parent, v));
            parent[ra.max(rb)] = ra.min(rb);
        }
        let mut total = S::zero();
        let mut chosen = Vec::new();
        let mut components = n - path.len() + 1;
        for &ei in &self.by_secondary {
            if components == 1 {
                break;
            }
            let (u, v, _, _) = self.compiled.edges[ei];
            let (ru, rv) = (find(&mut parent, u), find(&mut parent, v));
            if ru == rv {
                continue;
            }
            parent[ru.max(rv)] = ru.min(rv);
            total = total + self.secondary[ei];
            chosen.push(ei);
            components -= 1;
        }
        debug_assert_eq!(components, 1, "connected input must contract fully");
        (total, chosen)
    }

    fn design_for(&self, path: &[usize]) -> TwoLevelDesign<S> {
        let mut total = S::zero();
        let mut primary_edges = Vec::with_capacity(path.len() - 1);
        for w in path.windows(2) {
            let ei = self.edge_index(w[0], w[1]);
            total = total + self.primary[ei];
            primary_edges.push((
                self.compiled.ids[w[0]].clone(),
                self.compiled.ids[w[1]].clone(),
            ));
        }
        let (sec_total, mut chosen) = self.secondary_attachment(path);
        total = total + sec_total;
        chosen.sort_unstable();
        TwoLevelDesign {
            primary_nodes: path.iter().map(|&v| self.compiled.ids[v].clone()).collect(),
            primary_edges,
            secondary_edges: chosen
                .into_iter()
                .map(|ei| {
                    let (u, v, _, _) = self.compiled.edges[ei];
                    (self.compiled.ids[u].clone(), self.compiled.ids[v].clone())
                })
                .collect(),
            total_cost: total,
        }
    }
}

/// Exact two-level design: exhaust every simple primary path (canonical
/// orientation, ascending depth-first order) and attach the rest by the
/// cheapest secondary forest; the first cheapest candidate in enumeration
/// order wins. Default node cap [`DEFAULT_HTND_EXACT_LIMIT`].
pub fn htnd_exact<S: Scalar>(graph: &Graph<S>) -> Result<TwoLevelDesign<S>, NetError> {
    htnd_exact_with_limit(graph, DEFAULT_HTND_EXACT_LIMIT)
}

pub fn htnd_exact_with_limit<S: Scalar>(
    graph: &Graph<S>,
    limit: usize,
) -> Result<TwoLevelDesign<S>, NetError> {
    let costed = CostedGraph::new(graph)?;
    let n = costed.compiled.n();
    if n > limit.min(MASK_CAP) {
        return Err(NetError::TooLarge {
            n,
            limit: limit.min(MASK_CAP),
        });
    }
    let mut best: Option<TwoLevelDesign<S>> = None;
    let mut path: Vec<usize> = Vec::with_capacity(n);
    let mut on_path = vec![false; n];
    // Iterative DFS over simple paths: each stack frame remembers how far
    // through the neighbor list of its node it has advanced.
    for start in 0..n {
        path.push(start);
        on_path[start] = true;
        let mut cursors = vec![0usize];
        while !path.is_empty() {
            let u = *path.last().unwrap();
            let cursor = cursors.last_mut().unwrap();
            if *cursor < costed.compiled.adj[u].len() {
                let v = costed.compiled.adj[u][*cursor];
                *cursor += 1;
                if on_path[v] {
                    continue;
                }
                path.push(v);
                on_path[v] = true;
                cursors.push(0);
                if path[0] < *path.last().unwrap() {
                    let candidate = costed.design_for(&path);
                    let better = match &best {
                        None => true,
                        Some(b) => candidate.total_cost < b.total_cost,
                    };
                    if better {
                        best = Some(candidate);
                    }
                }
            } else {
                cursors.pop();
                on_path[u] = false;
                path.pop();
            }
        }
    }
    best.ok_or(NetError::Disconnected)
}

/// Heuristic two-level design: try every single edge as a minimal primary
/// path plus primary-shortest paths between the most eccentric node pairs,
/// attach the rest by the cheapest secondary forest, and keep the best
/// candidate examined.
pub fn htnd_heuristic<S: Scalar>(graph: &Graph<S>) -> Result<TwoLevelDesign<S>, NetError> {
    let costed = CostedGraph::new(graph)?;
    let n = costed.compiled.n();
    let mut candidates: Vec<Vec<usize>> = Vec::new();
    for &(u, v, _, _) in &costed.compiled.edges {
        candidates.push(vec![u, v]);
    }
    // Primary-cost shortest paths from every node (dense Dijkstra; ties
    // break toward the smaller node index for both pop and parent choice).
    let mut dist_rows: Vec<Vec<S>> = Vec::with_capacity(n);
    let mut parent_rows: Vec<Vec<usize>> = Vec::with_capacity(n);
    for s in 0..n {
        let mut dist = vec![S::infinity(); n];
        let mut parent = vec![usize::MAX; n];
        let mut done = vec![false; n];
        dist[s] = S::zero();
        for _ in 0..n {
            let u = match (0..n)
                .filter(|&v| !done[v] && dist[v] < S::infinity())
                .min_by(|&a, &b| {
                    dist[a]
                        .partial_cmp(&dist[b])
                        .unwrap_or(std::cmp::Ordering::Equal)
                        .then(a.cmp(&b))
                }) {
                Some(u) => u,
                None => break,
            };
            done[u] = true;
            for &v in &costed.compiled.adj[u] {
                let ei = costed.edge_index(u, v);
                let nd = dist[u] + costed.primary[ei];
                if nd < dist[v] || (nd == dist[v] && u < parent[v]) {
                    dist[v] = nd;
                    parent[v] = u;
                }
            }
        }
        dist_rows.push(dist);
        parent_rows.push(parent);
    }
    let mut pairs: Vec<(usize, usize)> = (0..n)
        .flat_map(|u| ((u + 1)..n).map(move |v| (u, v)))
        .collect();
    pairs.sort_by(|&(a1, b1), &(a2, b2)| {
        dist_rows[a2][b2]
            .partial_cmp(&dist_rows[a1][b1])
            .unwrap_or(std::cmp::Ordering::Equal)
            .then((a1, b1).cmp(&(a2, b2)))
    });
    for &(u, v) in pairs.iter().take(10) {
        let mut walk = vec![v];
        let mut cur = v;
        while cur != u {
            cur = parent_rows[u][cur];
            walk.push(cur);
        }
        walk.reverse();
        if walk.len() >= 2 {
            candidates.push(walk);
        }
    }
    let mut best: Option<TwoLevelDesign<S>> = None;
    for mut path in candidates {
        if path[0] > *path.last().unwrap() {
            path.reverse();
        }
        let candidate = costed.design_for(&path);
        let better = match &best {
            None => true,
            Some(b) => candidate.total_cost < b.total_cost,
        };
        if better {
            best = Some(candidate);
        }
    }
    best.ok_or(NetError::Disconnected)
}
