//! Weighted simple graphs, edge-list I/O and keyed Dijkstra.

use std::cmp::Reverse;
use std::collections::{BinaryHeap, HashMap};
use std::fmt;
use std::path::Path;

pub type NodeId = usize;
pub type EdgeId = usize;
pub type Weight = u64;

/// Largest admissible edge weight (exclusive).
pub const WEIGHT_LIMIT: Weight = 1 << 63;

/// A path length, with a dedicated infinity.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Dist {
    Finite(u128),
    Infinite,
}

impl Dist {
    pub fn is_finite(self) -> bool {
        matches!(self, Dist::Finite(_))
    }

    pub fn finite(self) -> Option<u128> {
        match self {
            Dist::Finite(d) => Some(d),
            Dist::Infinite => None,
        }
    }

    pub fn plus(self, w: u128) -> Dist {
        match self {
            Dist::Finite(d) => Dist::Finite(d + w),
            Dist::Infinite => Dist::Infinite,
        }
    }

    pub fn from_option(d: Option<u128>) -> Dist {
        d.map_or(Dist::Infinite, Dist::Finite)
    }
}

impl fmt::Display for Dist {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Dist::Finite(d) => write!(f, "{d}"),
            Dist::Infinite => write!(f, "inf"),
        }
    }
}

#[derive(Debug, thiserror::Error)]
pub enum GraphError {
    #[error("line {line}: {msg}")]
    Parse { line: usize, msg: String },
    #[error("self-loop at node {0}")]
    SelfLoop(NodeId),
    #[error("parallel edge between {0} and {1}")]
    ParallelEdge(NodeId, NodeId),
    #[error("node {node} out of range for a graph with {n} nodes")]
    NodeOutOfRange { node: NodeId, n: usize },
    #[error("weight {0} outside the admissible range")]
    BadWeight(Weight),
    #[error("header announces {expected} edges but {found} were read")]
    EdgeCount { expected: usize, found: usize },
    #[error("{0} is not a path of the graph")]
    NotAPath(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Edge {
    pub u: NodeId,
    pub v: NodeId,
    pub w: Weight,
}

impl Edge {
    /// The endpoint opposite to `x`.
    pub fn other(&self, x: NodeId) -> NodeId {
        if x == self.u {
            self.v
        } else {
            self.u
        }
    }
}

/// A simple graph with integer edge weights.
///
/// Undirected graphs list every edge in both endpoints' `out` lists.
/// Strict graphs require `1 <= w < 2^63`; relaxed graphs also accept `w = 0`.
#[derive(Clone, Debug)]
pub struct WeightedGraph {
    n: usize,
    directed: bool,
    relaxed: bool,
    edges: Vec<Edge>,
    out: Vec<Vec<(NodeId, EdgeId)>>,
    inc: Vec<Vec<(NodeId, EdgeId)>>,
    index: HashMap<(NodeId, NodeId), EdgeId>,
}

impl WeightedGraph {
    pub fn new(n: usize, directed: bool) -> Self {
        Self::with_policy(n, directed, false)
    }

    /// A graph that admits zero-weight edges.
    pub fn relaxed(n: usize, directed: bool) -> Self {
        Self::with_policy(n, directed, true)
    }

    fn with_policy(n: usize, directed: bool, relaxed: bool) -> Self {
        WeightedGraph {
            n,
            directed,
            relaxed,
            edges: Vec::new(),
            out: vec![Vec::new(); n],
            inc: vec![Vec::new(); n],
            index: HashMap::new(),
        }
    }

    fn key(&self, u: NodeId, v: NodeId) -> (NodeId, NodeId) {
        if self.directed {
            (u, v)
        } else {
            (u.min(v), u.max(v))
        }
    }

    pub fn add_edge(&mut self, u: NodeId, v: NodeId, w: Weight) -> Result<EdgeId, GraphError> {
        for x in [u, v] {
            if x >= self.n {
                return Err(GraphError::NodeOutOfRange { node: x, n: self.n });
            }
        }
        if u == v {
            return Err(GraphError::SelfLoop(u));
        }
        if w >= WEIGHT_LIMIT || (w == 0 && !self.relaxed) {
            return Err(GraphError::BadWeight(w));
        }
        let key = self.key(u, v);
        if self.index.contains_key(&key) {
            return Err(GraphError::ParallelEdge(u, v));
        }
        let id = self.edges.len();
        self.index.insert(key, id);
        self.edges.push(Edge { u, v, w });
        self.out[u].push((v, id));
        self.inc[v].push((u, id));
        if !self.directed {
            self.out[v].push((u, id));
            self.inc[u].push((v, id));
        }
        Ok(id)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn m(&self) -> usize {
        self.edges.len()
    }

    pub fn is_directed(&self) -> bool {
        self.directed
    }

    pub fn is_relaxed(&self) -> bool {
        self.relaxed
    }

    pub fn edges(&self) -> &[Edge] {
        &self.edges
    }

    pub fn edge(&self, e: EdgeId) -> Edge {
        self.edges[e]
    }

    /// Outgoing neighbours (all neighbours when undirected).
    pub fn out_neighbors(&self, u: NodeId) -> &[(NodeId, EdgeId)] {
        &self.out[u]
    }

    /// Incoming neighbours (all neighbours when undirected).
    pub fn in_neighbors(&self, u: NodeId) -> &[(NodeId, EdgeId)] {
        &self.inc[u]
    }

    /// Neighbours in the underlying undirected graph, which is also the
    /// communication network.
    pub fn links(&self, u: NodeId) -> Vec<(NodeId, EdgeId)> {
        if self.directed {
            let mut l: Vec<_> = self.out[u].iter().chain(self.inc[u].iter()).copied().collect();
            l.sort_unstable();
            l
        } else {
            self.out[u].clone()
        }
    }

    pub fn edge_between(&self, u: NodeId, v: NodeId) -> Option<EdgeId> {
        self.index.get(&self.key(u, v)).copied()
    }

    /// Largest edge weight, or 0 for an edgeless graph.
    pub fn max_weight(&self) -> Weight {
        self.edges.iter().map(|e| e.w).max().unwrap_or(0)
    }

    /// Same topology with every weight replaced by 1.
    pub fn unit_weights(&self) -> WeightedGraph {
        self.map_weights(|_, _| 1)
    }

    pub fn map_weights(&self, mut f: impl FnMut(EdgeId, &Edge) -> Weight) -> WeightedGraph {
        let mut g = WeightedGraph::with_policy(self.n, self.directed, self.relaxed);
        for (id, e) in self.edges.iter().enumerate() {
            g.add_edge(e.u, e.v, f(id, e)).expect("weights stay admissible");
        }
        g
    }

    /// Serialises to the edge-list format read by [`parse_graph`].
    pub fn to_edge_list(&self) -> String {
        let mut s = format!(
            "{} {} {}\n",
            self.n,
            self.m(),
            if self.directed { "directed" } else { "undirected" }
        );
        for e in &self.edges {
            s.push_str(&format!("{} {} {}\n", e.u, e.v, e.w));
        }
        s
    }
}

/// Parses `n m directed|undirected` followed by `m` lines `u v w`.
/// Blank lines and lines starting with `#` are skipped.
pub fn parse_graph(text: &str) -> Result<WeightedGraph, GraphError> {
    parse_with_policy(text, false)
}

/// Like [`parse_graph`] but admits zero weights.
pub fn parse_graph_relaxed(text: &str) -> Result<WeightedGraph, GraphError> {
    parse_with_policy(text, true)
}

fn parse_with_policy(text: &str, relaxed: bool) -> Result<WeightedGraph, GraphError> {
    let mut lines = text
        .lines()
        .enumerate()
        .map(|(i, l)| (i + 1, l.trim()))
        .filter(|(_, l)| !l.is_empty() && !l.starts_with('#'));
    let (hline, header) = lines.next().ok_or(GraphError::Parse {
        line: 0,
        msg: "missing header".into(),
    })?;
    let fields: Vec<&str> = header.split_whitespace().collect();
    if fields.len() != 3 {
        return Err(GraphError::Parse {
            line: hline,
            msg: "header must be `n m directed|undirected`".into(),
        });
    }
    let num = |s: &str, line: usize| -> Result<u64, GraphError> {
        s.parse::<u64>().map_err(|e| GraphError::Parse {
            line,
            msg: format!("`{s}`: {e}"),
        })
    };
    let n = num(fields[0], hline)? as usize;
    let m = num(fields[1], hline)? as usize;
    let directed = match fields[2] {
        "directed" => true,
        "undirected" => false,
        other => {
            return Err(GraphError::Parse {
                line: hline,
                msg: format!("unknown orientation `{other}`"),
            })
        }
    };
    let mut g = WeightedGraph::with_policy(n, directed, relaxed);
    for (line, l) in lines {
        let f: Vec<&str> = l.split_whitespace().collect();
        if f.len() != 3 {
            return Err(GraphError::Parse {
                line,
                msg: "edge lines must be `u v w`".into(),
            });
        }
        let (u, v, w) = (num(f[0], line)?, num(f[1], line)?, num(f[2], line)?);
        g.add_edge(u as usize, v as usize, w)?;
    }
    if g.m() != m {
        return Err(GraphError::EdgeCount {
            expected: m,
            found: g.m(),
        });
    }
    Ok(g)
}

pub fn load_graph(path: impl AsRef<Path>) -> Result<WeightedGraph, GraphError> {
    parse_graph(&std::fs::read_to_string(path)?)
}

/// A walk along edges of a graph.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PathRecord {
    pub nodes: Vec<NodeId>,
    pub edges: Vec<EdgeId>,
    pub weight: u128,
}

impl PathRecord {
    /// Builds the path through `nodes`, looking up each consecutive edge.
    pub fn from_nodes(g: &WeightedGraph, nodes: &[NodeId]) -> Result<Self, GraphError> {
        if nodes.is_empty() {
            return Err(GraphError::NotAPath("empty node list".into()));
        }
        let mut edges = Vec::with_capacity(nodes.len().saturating_sub(1));
        let mut weight = 0u128;
        for w in nodes.windows(2) {
            let e = g
                .edge_between(w[0], w[1])
                .filter(|&e| !g.is_directed() || g.edge(e).u == w[0])
                .ok_or_else(|| GraphError::NotAPath(format!("{nodes:?}")))?;
            weight += g.edge(e).w as u128;
            edges.push(e);
        }
        Ok(PathRecord {
            nodes: nodes.to_vec(),
            edges,
            weight,
        })
    }

    pub fn hops(&self) -> usize {
        self.edges.len()
    }

    pub fn source(&self) -> NodeId {
        self.nodes[0]
    }

    pub fn target(&self) -> NodeId {
        *self.nodes.last().unwrap()
    }
}

/// A simple cycle, listed without repeating the start node.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CycleRecord {
    pub nodes: Vec<NodeId>,
    pub edges: Vec<EdgeId>,
    pub weight: u128,
}

impl CycleRecord {
    /// Closes the path `nodes[0] .. nodes[last]` with the edge back to `nodes[0]`.
    pub fn from_nodes(g: &WeightedGraph, nodes: &[NodeId]) -> Result<Self, GraphError> {
        let min_hops = if g.is_directed() { 2 } else { 3 };
        let mut closed = nodes.to_vec();
        closed.push(nodes[0]);
        let p = PathRecord::from_nodes(g, &closed)?;
        let mut seen = nodes.to_vec();
        seen.sort_unstable();
        seen.dedup();
        if nodes.len() < min_hops || seen.len() != nodes.len() {
            return Err(GraphError::NotAPath(format!("{nodes:?} is not a simple cycle")));
        }
        Ok(CycleRecord {
            nodes: nodes.to_vec(),
            edges: p.edges,
            weight: p.weight,
        })
    }

    pub fn hops(&self) -> usize {
        self.edges.len()
    }
}

/// Output of a Dijkstra run: per node the best key and the tree edge into it.
#[derive(Clone, Debug)]
pub struct KeyedTree<K> {
    pub key: Vec<Option<K>>,
    pub parent: Vec<Option<(NodeId, EdgeId)>>,
}

impl<K> KeyedTree<K> {
    /// Nodes from the seed to `v` along parent pointers.
    pub fn path_to(&self, v: NodeId) -> Option<Vec<NodeId>> {
        self.key[v].as_ref()?;
        let mut p = vec![v];
        let mut x = v;
        while let Some((y, _)) = self.parent[x] {
            p.push(y);
            x = y;
        }
        p.reverse();
        Some(p)
    }
}

/// Dijkstra over an ordered key type.
///
/// `extend(key, edge, w)` must never produce a key smaller than its input.
/// Edges in `skip` are ignored; keys above `bound` are not settled. A node's
/// parent is the first relaxation that strictly improved its key, with heap
/// ties broken by node id, so the result is deterministic.
pub fn dijkstra_by<K, F>(
    g: &WeightedGraph,
    seeds: impl IntoIterator<Item = (NodeId, K)>,
    extend: F,
    skip: Option<EdgeId>,
    bound: Option<K>,
) -> KeyedTree<K>
where
    K: Copy + Ord,
    F: Fn(K, EdgeId, Weight) -> K,
{
    let n = g.n();
    let mut key: Vec<Option<K>> = vec![None; n];
    let mut parent = vec![None; n];
    let mut done = vec![false; n];
    let mut heap = BinaryHeap::new();
    for (s, k) in seeds {
        if bound.is_some_and(|b| k > b) {
            continue;
        }
        if key[s].is_none_or(|old| k < old) {
            key[s] = Some(k);
            heap.push(Reverse((k, s)));
        }
    }
    while let Some(Reverse((k, u))) = heap.pop() {
        if done[u] || key[u] != Some(k) {
            continue;
        }
        done[u] = true;
        for &(v, e) in g.out_neighbors(u) {
            if Some(e) == skip || done[v] {
                continue;
            }
            let nk = extend(k, e, g.edge(e).w);
            if bound.is_some_and(|b| nk > b) {
                continue;
            }
            if key[v].is_none_or(|old| nk < old) {
                key[v] = Some(nk);
                parent[v] = Some((u, e));
                heap.push(Reverse((nk, v)));
            }
        }
    }
    KeyedTree { key, parent }
}

/// Shortest distances from a virtual source joined to each seed `(node, offset)`.
pub fn dijkstra(g: &WeightedGraph, seeds: &[(NodeId, u128)]) -> KeyedTree<u128> {
    dijkstra_by(g, seeds.iter().copied(), |k, _, w| k + w as u128, None, None)
}

pub fn distances(g: &WeightedGraph, s: NodeId) -> Vec<Dist> {
    dijkstra(g, &[(s, 0)]).key.into_iter().map(Dist::from_option).collect()
}

/// Hop distances from `s` in the underlying undirected graph.
pub fn bfs_hops(g: &WeightedGraph, s: NodeId) -> Vec<Option<usize>> {
    let mut d = vec![None; g.n()];
    let mut queue = std::collections::VecDeque::from([s]);
    d[s] = Some(0);
    while let Some(u) = queue.pop_front() {
        let du = d[u].unwrap();
        for (v, _) in g.links(u) {
            if d[v].is_none() {
                d[v] = Some(du + 1);
                queue.push_back(v);
            }
        }
    }
    d
}

/// Largest finite hop distance in the underlying undirected graph, and
/// whether that graph is connected.
pub fn hop_diameter(g: &WeightedGraph) -> (usize, bool) {
    let mut diam = 0;
    let mut connected = true;
    for s in 0..g.n() {
        for d in bfs_hops(g, s) {
            match d {
                Some(d) => diam = diam.max(d),
                None => connected = false,
            }
        }
    }
    (diam, connected)
}

/// Strongly connected component id of every node (Kosaraju); ids follow
/// the order in which components are found. For undirected graphs these
/// are the connected components.
pub fn strongly_connected_components(g: &WeightedGraph) -> Vec<usize> {
    let n = g.n();
    let mut order = Vec::with_capacity(n);
    let mut seen = vec![false; n];
    for s in 0..n {
        if seen[s] {
            continue;
        }
        seen[s] = true;
        let mut stack = vec![(s, 0usize)];
        while let Some((u, i)) = stack.pop() {
            if let Some(&(v, _)) = g.out_neighbors(u).get(i) {
                stack.push((u, i + 1));
                if !seen[v] {
                    seen[v] = true;
                    stack.push((v, 0));
                }
            } else {
                order.push(u);
            }
        }
    }
    let mut comp = vec![usize::MAX; n];
    let mut next = 0;
    for &s in order.iter().rev() {
        if comp[s] != usize::MAX {
            continue;
        }
        comp[s] = next;
        let mut stack = vec![s];
        while let Some(u) = stack.pop() {
            for &(v, _) in g.in_neighbors(u) {
                if comp[v] == usize::MAX {
                    comp[v] = next;
                    stack.push(v);
                }
            }
        }
        next += 1;
    }
    comp
}
