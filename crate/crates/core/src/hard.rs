//! Lower-bound instances: two families of parallel paths tied together by a
//! d-ary tree and joined at both ends by copies of a high-girth bipartite
//! graph whose edges are switched on by two bit strings.
//!
//! When the strings share a one the graph has a light cycle; otherwise every
//! cycle is at least `k + 1` times heavier.

use num_bigint::BigInt;
use num_traits::{One, ToPrimitive, Zero};
use rand::seq::SliceRandom;
use rand::Rng;
use serde::Serialize;

use crate::cycles::{exact_mwc_weight, girth_unweighted};
use crate::graph::{bfs_hops, dijkstra, strongly_connected_components, Dist, EdgeId, GraphError, NodeId, WeightedGraph};
use crate::scaling::Rational;

#[derive(Debug, thiserror::Error)]
pub enum HardError {
    #[error("bit strings must have one bit per edge of H ({expected}), got {x} and {y}")]
    BitLength { expected: usize, x: usize, y: usize },
    #[error("branching factor must be at least 2, got {0}")]
    Branching(u64),
    #[error("depth must be at least 1")]
    Depth,
    #[error("girth parameter must be at least 1")]
    GirthParameter,
    #[error("H has {got} nodes per side, expected {expected}")]
    SideSize { expected: usize, got: usize },
    #[error("instance too large: {0} nodes")]
    TooLarge(u128),
    #[error("the moving cut needs all-ones bit strings")]
    NotAllOnes,
    #[error(transparent)]
    Graph(#[from] GraphError),
}

/// A bipartite graph with `gamma` left and `gamma` right nodes; edges are
/// `(left, right)` sorted lexicographically, which fixes the edge indexing.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Bipartite {
    pub gamma: usize,
    pub edges: Vec<(usize, usize)>,
}

impl Bipartite {
    pub fn new(gamma: usize, mut edges: Vec<(usize, usize)>) -> Self {
        edges.sort_unstable();
        edges.dedup();
        Bipartite { gamma, edges }
    }

    pub fn complete(gamma: usize) -> Self {
        Bipartite::new(gamma, (0..gamma).flat_map(|a| (0..gamma).map(move |b| (a, b))).collect())
    }

    /// Left node `a` is `a`, right node `b` is `gamma + b`.
    pub fn to_graph(&self) -> WeightedGraph {
        let mut g = WeightedGraph::new(2 * self.gamma, false);
        for &(a, b) in &self.edges {
            g.add_edge(a, self.gamma + b, 1).expect("simple bipartite graph");
        }
        g
    }

    pub fn girth(&self) -> Option<usize> {
        girth_unweighted(&self.to_graph())
    }
}

/// `K_{gamma,gamma}` for `k = 1`; otherwise all pairs in random order, each
/// kept unless it would close a cycle of length at most `2k`.
pub fn gen_high_girth_bipartite<R: Rng + ?Sized>(gamma: usize, k: usize, rng: &mut R) -> Result<Bipartite, HardError> {
    if k == 0 {
        return Err(HardError::GirthParameter);
    }
    if k == 1 {
        return Ok(Bipartite::complete(gamma));
    }
    let mut pairs: Vec<(usize, usize)> = (0..gamma).flat_map(|a| (0..gamma).map(move |b| (a, b))).collect();
    pairs.shuffle(rng);
    let mut g = WeightedGraph::new(2 * gamma, false);
    let mut kept = Vec::new();
    for (a, b) in pairs {
        // a new edge closes a cycle of length hops + 1
        let hops = bfs_hops(&g, a)[gamma + b];
        if hops.is_none_or(|h| h + 1 > 2 * k) {
            g.add_edge(a, gamma + b, 1)?;
            kept.push((a, b));
        }
    }
    Ok(Bipartite::new(gamma, kept))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Variant {
    /// Oriented edges, all of weight 1.
    DirectedUnweighted,
    /// Heavy tree, weightless paths, unit bipartite edges.
    UndirectedWeighted,
}

impl std::str::FromStr for Variant {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "directed" | "directed-unweighted" => Ok(Variant::DirectedUnweighted),
            "weighted" | "undirected-weighted" => Ok(Variant::UndirectedWeighted),
            other => Err(format!("unknown variant {other:?}")),
        }
    }
}

/// Which part of the construction an edge belongs to.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum EdgeRole {
    LeftPath,
    RightPath,
    /// Between tree levels `level - 1` and `level`.
    Tree { level: u32 },
    /// From a leaf to the node at the same position on a path.
    Leaf,
    /// Between the first nodes of the paths, switched by `x`.
    FirstLayer,
    /// Between the last nodes of the paths, switched by `y`.
    LastLayer,
}

#[derive(Clone, Debug)]
pub struct HardInstance {
    pub graph: WeightedGraph,
    pub variant: Variant,
    pub gamma: usize,
    pub k: usize,
    pub d: u64,
    pub p: u32,
    pub h: Bipartite,
    pub x: Vec<bool>,
    pub y: Vec<bool>,
    pub roles: Vec<EdgeRole>,
    /// Nodes per path, `d^p`.
    pub path_len: usize,
    /// Weight of tree and leaf edges in the weighted variant.
    pub heavy: u64,
}

impl HardInstance {
    /// Node `j` of the `i`-th path on the first-layer side (`v^i_j`).
    pub fn left_path(&self, i: usize, j: usize) -> NodeId {
        i * self.path_len + j
    }

    /// Node `j` of the `i`-th path on the other side (`w^i_j`).
    pub fn right_path(&self, i: usize, j: usize) -> NodeId {
        (self.gamma + i) * self.path_len + j
    }

    /// Tree node `i` on `level` (the root is level 0).
    pub fn tree_node(&self, level: u32, i: usize) -> NodeId {
        let d = self.d as usize;
        2 * self.gamma * self.path_len + (d.pow(level) - 1) / (d - 1) + i
    }

    /// The leaves at both ends of the leaf level.
    pub fn outputs(&self) -> (NodeId, NodeId) {
        (self.tree_node(self.p, 0), self.tree_node(self.p, self.path_len - 1))
    }

    /// `(w^b_0, v^a)` for every edge `(a, b)` of `H`.
    pub fn source_sink_pairs(&self) -> Vec<(NodeId, NodeId)> {
        self.h
            .edges
            .iter()
            .map(|&(a, b)| (self.right_path(b, 0), self.left_path(a, self.path_len - 1)))
            .collect()
    }

    pub fn intersecting(&self) -> bool {
        self.x.iter().zip(&self.y).any(|(&a, &b)| a && b)
    }

    /// `2 gamma d^p + (d^{p+1} - 1) / (d - 1)`.
    pub fn expected_nodes(&self) -> usize {
        let d = self.d as usize;
        2 * self.gamma * self.path_len + (d.pow(self.p + 1) - 1) / (d - 1)
    }

    pub fn nominal_diameter(&self) -> usize {
        2 * self.p as usize + 2
    }

    /// Hop diameter of the underlying undirected graph.
    pub fn diameter(&self) -> usize {
        crate::graph::hop_diameter(&self.graph).0
    }

    /// JSON description of the node roles and inputs.
    pub fn sidecar(&self) -> serde_json::Value {
        let (alpha, beta) = self.outputs();
        let paths = |side: fn(&Self, usize, usize) -> NodeId| -> Vec<Vec<NodeId>> {
            (0..self.gamma)
                .map(|i| (0..self.path_len).map(|j| side(self, i, j)).collect())
                .collect()
        };
        let tree: Vec<Vec<NodeId>> = (0..=self.p)
            .map(|t| (0..(self.d as usize).pow(t)).map(|i| self.tree_node(t, i)).collect())
            .collect();
        serde_json::json!({
            "variant": self.variant,
            "gamma": self.gamma,
            "k": self.k,
            "d": self.d,
            "p": self.p,
            "h_edges": self.h.edges,
            "bits": self.x.len(),
            "x": bits_to_hex(&self.x),
            "y": bits_to_hex(&self.y),
            "left_paths": paths(Self::left_path),
            "right_paths": paths(Self::right_path),
            "tree_levels": tree,
            "alpha": alpha,
            "beta": beta,
            "source_sink_pairs": self.source_sink_pairs(),
        })
    }
}

/// Packs bits most significant first, padding the last byte with zeros.
pub fn bits_to_hex(bits: &[bool]) -> String {
    let bytes: Vec<u8> = bits
        .chunks(8)
        .map(|c| c.iter().enumerate().fold(0u8, |acc, (i, &b)| acc | ((b as u8) << (7 - i))))
        .collect();
    hex::encode(bytes)
}

/// Builds the instance for the given bipartite graph and bit strings.
#[allow(clippy::too_many_arguments)]
pub fn gen_lower_bound_graph(
    gamma: usize,
    k: usize,
    d: u64,
    p: u32,
    h: &Bipartite,
    x: &[bool],
    y: &[bool],
    variant: Variant,
) -> Result<HardInstance, HardError> {
    if d < 2 {
        return Err(HardError::Branching(d));
    }
    if p == 0 {
        return Err(HardError::Depth);
    }
    if k == 0 {
        return Err(HardError::GirthParameter);
    }
    if h.gamma != gamma {
        return Err(HardError::SideSize { expected: gamma, got: h.gamma });
    }
    if x.len() != h.edges.len() || y.len() != h.edges.len() {
        return Err(HardError::BitLength {
            expected: h.edges.len(),
            x: x.len(),
            y: y.len(),
        });
    }
    let path_len = (d as u128).checked_pow(p).unwrap_or(u128::MAX);
    let total = 2 * gamma as u128 * path_len + path_len.saturating_mul(d as u128) / (d as u128 - 1) + 1;
    if total > 1 << 24 {
        return Err(HardError::TooLarge(total));
    }
    let path_len = path_len as usize;
    let directed = variant == Variant::DirectedUnweighted;
    let mut inst = HardInstance {
        graph: WeightedGraph::relaxed(0, directed),
        variant,
        gamma,
        k,
        d,
        p,
        h: h.clone(),
        x: x.to_vec(),
        y: y.to_vec(),
        roles: Vec::new(),
        path_len,
        heavy: 0,
    };
    let n = inst.expected_nodes();
    inst.heavy = 4 * (n as u64) * (n as u64);
    let (heavy, path_w) = match variant {
        Variant::DirectedUnweighted => (1, 1),
        Variant::UndirectedWeighted => (inst.heavy, 0),
    };
    let mut g = WeightedGraph::relaxed(n, directed);
    let mut roles = Vec::new();
    let mut add = |g: &mut WeightedGraph, u: NodeId, v: NodeId, w: u64, role: EdgeRole| -> Result<(), HardError> {
        g.add_edge(u, v, w)?;
        roles.push(role);
        Ok(())
    };
    for i in 0..gamma {
        for j in 0..path_len - 1 {
            add(&mut g, inst.left_path(i, j), inst.left_path(i, j + 1), path_w, EdgeRole::LeftPath)?;
        }
    }
    for i in 0..gamma {
        for j in 0..path_len - 1 {
            add(&mut g, inst.right_path(i, j + 1), inst.right_path(i, j), path_w, EdgeRole::RightPath)?;
        }
    }
    for level in 1..=p {
        for i in 0..(d as usize).pow(level) {
            let parent = inst.tree_node(level - 1, i / d as usize);
            add(&mut g, parent, inst.tree_node(level, i), heavy, EdgeRole::Tree { level })?;
        }
    }
    for i in 0..path_len {
        let leaf = inst.tree_node(p, i);
        for j in 0..gamma {
            add(&mut g, leaf, inst.left_path(j, i), heavy, EdgeRole::Leaf)?;
            add(&mut g, leaf, inst.right_path(j, i), heavy, EdgeRole::Leaf)?;
        }
    }
    let last = path_len - 1;
    for (idx, &(a, b)) in h.edges.iter().enumerate() {
        if x[idx] {
            add(&mut g, inst.right_path(b, 0), inst.left_path(a, 0), 1, EdgeRole::FirstLayer)?;
        }
    }
    for (idx, &(a, b)) in h.edges.iter().enumerate() {
        if y[idx] {
            add(&mut g, inst.left_path(a, last), inst.right_path(b, last), 1, EdgeRole::LastLayer)?;
        }
    }
    inst.graph = g;
    inst.roles = roles;
    Ok(inst)
}

/// Outcome of checking the cycle-weight gap.
#[derive(Clone, Debug)]
pub struct GapReport {
    pub mwc: Dist,
    pub intersecting: bool,
    /// Weight of the light cycle the construction guarantees.
    pub short: u128,
    /// Lower bound on every cycle when the inputs are disjoint.
    pub long: u128,
    pub gap_ok: bool,
}

/// Light cycle `2` (weighted) or `2 d^p` (directed: two paths of `d^p - 1`
/// edges plus two layer edges); otherwise at least `k + 1` times that.
pub fn verify_gap(inst: &HardInstance) -> GapReport {
    let mwc = exact_mwc_weight(&inst.graph);
    let short = match inst.variant {
        Variant::UndirectedWeighted => 2,
        Variant::DirectedUnweighted => 2 * inst.path_len as u128,
    };
    let long = (inst.k as u128 + 1) * short;
    let intersecting = inst.intersecting();
    let gap_ok = if intersecting {
        mwc == Dist::Finite(short)
    } else {
        mwc.finite().is_none_or(|w| w >= long)
    };
    GapReport {
        mwc,
        intersecting,
        short,
        long,
        gap_ok,
    }
}

/// True iff no tree or leaf edge lies inside a strongly connected component.
pub fn tree_edges_acyclic(inst: &HardInstance) -> bool {
    let comp = strongly_connected_components(&inst.graph);
    inst.graph
        .edges()
        .iter()
        .zip(&inst.roles)
        .filter(|(_, r)| matches!(r, EdgeRole::Tree { .. } | EdgeRole::Leaf))
        .all(|(e, _)| comp[e.u] != comp[e.v])
}

/// Edge lengths that spread a capacity of `|E(H)|` evenly over the tree levels.
#[derive(Clone, Debug)]
pub struct MovingCutAssignment {
    pub lengths: Vec<Rational>,
    /// `sum (length - 1)`.
    pub capacity: Rational,
    /// Shortest source-sink distance under `lengths`.
    pub distance: Rational,
    /// The same with every length rounded up.
    pub rounded_capacity: u128,
    pub rounded_distance: u128,
    /// Source-sink distance when the tree is not used (all lengths 1).
    pub path_route: u128,
}

/// Level-`i` tree edges get `1 + |E(H)| / (p d^i)`; every other edge 1.
/// Distances are over the undirected topology.
pub fn moving_cut(inst: &HardInstance) -> Result<MovingCutAssignment, HardError> {
    if !(inst.x.iter().all(|&b| b) && inst.y.iter().all(|&b| b)) {
        return Err(HardError::NotAllOnes);
    }
    let e_h = BigInt::from(inst.h.edges.len());
    let p = BigInt::from(inst.p);
    let d = BigInt::from(inst.d);
    let lengths: Vec<Rational> = inst
        .roles
        .iter()
        .map(|r| match r {
            EdgeRole::Tree { level } => Rational::one() + Rational::new(e_h.clone(), &p * num_traits::pow(d.clone(), *level as usize)),
            _ => Rational::one(),
        })
        .collect();
    let capacity = lengths.iter().fold(Rational::zero(), |acc, l| acc + l - Rational::one());
    // scale to integers by the common denominator p d^p
    let denom = &p * num_traits::pow(d.clone(), inst.p as usize);
    let int_len: Vec<u64> = lengths
        .iter()
        .map(|l| (l * Rational::from_integer(denom.clone())).to_integer().to_u64().expect("length fits"))
        .collect();
    let rounded: Vec<u64> = lengths.iter().map(|l| l.ceil().to_integer().to_u64().expect("length fits")).collect();
    let rounded_capacity = rounded.iter().map(|&l| l as u128 - 1).sum();
    let pairs = inst.source_sink_pairs();
    let undirected = |w: &dyn Fn(EdgeId) -> Option<u64>| {
        let mut g = WeightedGraph::new(inst.graph.n(), false);
        for (e, edge) in inst.graph.edges().iter().enumerate() {
            if let Some(w) = w(e) {
                g.add_edge(edge.u, edge.v, w).expect("instance edges are simple");
            }
        }
        g
    };
    let min_pair = |g: &WeightedGraph| -> u128 {
        pairs
            .iter()
            .filter_map(|&(s, t)| dijkstra(g, &[(s, 0)]).key[t])
            .min()
            .unwrap_or(u128::MAX)
    };
    let scaled = min_pair(&undirected(&|e| Some(int_len[e])));
    let tree = |e: EdgeId| matches!(inst.roles[e], EdgeRole::Tree { .. } | EdgeRole::Leaf);
    Ok(MovingCutAssignment {
        distance: Rational::new(BigInt::from(scaled), denom),
        rounded_distance: min_pair(&undirected(&|e| Some(rounded[e]))),
        path_route: min_pair(&undirected(&|e| (!tree(e)).then_some(1))),
        lengths,
        capacity,
        rounded_capacity,
    })
}
