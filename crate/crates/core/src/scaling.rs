//! Subdividing weighted edges into unit-length paths.
//!
//! An edge of weight `w` becomes a path of `max(1, ceil(w / gamma))` unit
//! edges. Subdivision nodes of edge `e` get consecutive ids after the base
//! nodes, in edge order, so the owning edge of any node is recovered by a
//! binary search over the offset table.

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{Signed, ToPrimitive, Zero};

use crate::graph::{EdgeId, GraphError, NodeId, PathRecord, Weight, WeightedGraph};

pub type Rational = BigRational;

#[derive(Debug, thiserror::Error)]
pub enum ScalingError {
    #[error("scaling factor must be positive")]
    NonPositiveGamma,
    #[error("edge {0} would need more than 2^63 unit edges")]
    TooLong(EdgeId),
    #[error("path does not start and end at base nodes")]
    NotBaseEndpoints,
    #[error(transparent)]
    Graph(#[from] GraphError),
}

/// Exact rational view of a finite, positive `f64`.
pub fn rational_from_f64(x: f64) -> Rational {
    BigRational::from_float(x).expect("finite value")
}

pub fn ratio(num: i64, den: i64) -> Rational {
    BigRational::new(BigInt::from(num), BigInt::from(den))
}

/// Number of unit edges replacing an edge of weight `w`.
pub fn scaled_length(w: Weight, gamma: &Rational) -> Result<u64, ScalingError> {
    if !gamma.is_positive() {
        return Err(ScalingError::NonPositiveGamma);
    }
    let q = BigInt::from(w) * gamma.denom();
    let (c, r) = q.div_rem(gamma.numer());
    let c = if r.is_zero() { c } else { c + 1 };
    let c = c.to_u64().filter(|&c| c < 1 << 63).ok_or(ScalingError::TooLong(0))?;
    Ok(c.max(1))
}

/// Scaled lengths of every edge of `g`.
pub fn scaled_lengths(g: &WeightedGraph, gamma: &Rational) -> Result<Vec<u64>, ScalingError> {
    g.edges()
        .iter()
        .enumerate()
        .map(|(id, e)| scaled_length(e.w, gamma).map_err(|err| match err {
            ScalingError::TooLong(_) => ScalingError::TooLong(id),
            other => other,
        }))
        .collect()
}

/// The unit-weight subdivision of a base graph.
#[derive(Clone, Debug)]
pub struct ScaledGraph {
    pub graph: WeightedGraph,
    pub gamma: Rational,
    base_n: usize,
    lengths: Vec<u64>,
    /// First subdivision node id of each base edge (`base_n + prefix sum`).
    node_offset: Vec<usize>,
    /// First unit edge id of each base edge.
    edge_offset: Vec<usize>,
}

/// Builds the scaled graph. Node count is `n + sum(len(e) - 1)`.
pub fn graph_scaling(g: &WeightedGraph, gamma: &Rational) -> Result<ScaledGraph, ScalingError> {
    let lengths = scaled_lengths(g, gamma)?;
    let mut node_offset = Vec::with_capacity(g.m());
    let mut edge_offset = Vec::with_capacity(g.m());
    let (mut nodes, mut edges) = (g.n(), 0usize);
    for &len in &lengths {
        node_offset.push(nodes);
        edge_offset.push(edges);
        nodes += len as usize - 1;
        edges += len as usize;
    }
    let mut h = WeightedGraph::new(nodes, g.is_directed());
    for (id, e) in g.edges().iter().enumerate() {
        let len = lengths[id] as usize;
        let mut prev = e.u;
        for i in 0..len {
            let next = if i + 1 == len { e.v } else { node_offset[id] + i };
            h.add_edge(prev, next, 1)?;
            prev = next;
        }
    }
    Ok(ScaledGraph {
        graph: h,
        gamma: gamma.clone(),
        base_n: g.n(),
        lengths,
        node_offset,
        edge_offset,
    })
}

impl ScaledGraph {
    pub fn base_n(&self) -> usize {
        self.base_n
    }

    pub fn is_base_node(&self, x: NodeId) -> bool {
        x < self.base_n
    }

    pub fn length(&self, e: EdgeId) -> u64 {
        self.lengths[e]
    }

    pub fn lengths(&self) -> &[u64] {
        &self.lengths
    }

    /// Base edge that owns the subdivision node `x`.
    pub fn owner_of_node(&self, x: NodeId) -> Option<EdgeId> {
        if x < self.base_n {
            return None;
        }
        let i = self.node_offset.partition_point(|&o| o <= x);
        Some(i - 1)
    }

    /// Base edge that owns unit edge `f`.
    pub fn owner_of_edge(&self, f: EdgeId) -> EdgeId {
        self.edge_offset.partition_point(|&o| o <= f) - 1
    }

    /// Unit edge ids of the extending path of base edge `e`, from `u` to `v`.
    pub fn unit_edges(&self, e: EdgeId) -> std::ops::Range<EdgeId> {
        self.edge_offset[e]..self.edge_offset[e] + self.lengths[e] as usize
    }

    /// Node sequence of the extending path of base edge `e`, from `u` to `v`.
    pub fn extending_path(&self, g: &WeightedGraph, e: EdgeId) -> Vec<NodeId> {
        let edge = g.edge(e);
        let len = self.lengths[e] as usize;
        let mut p = Vec::with_capacity(len + 1);
        p.push(edge.u);
        p.extend(self.node_offset[e]..self.node_offset[e] + len - 1);
        p.push(edge.v);
        p
    }

    /// The scaled image of a base path.
    pub fn lift_path(&self, g: &WeightedGraph, p: &PathRecord) -> Result<PathRecord, ScalingError> {
        let mut nodes = vec![p.source()];
        for (i, &e) in p.edges.iter().enumerate() {
            let mut seg = self.extending_path(g, e);
            if seg[0] != p.nodes[i] {
                seg.reverse();
            }
            nodes.extend_from_slice(&seg[1..]);
        }
        Ok(PathRecord::from_nodes(&self.graph, &nodes)?)
    }

    /// The base path whose image is `p`; both ends must be base nodes.
    pub fn prescale_path(&self, g: &WeightedGraph, p: &PathRecord) -> Result<PathRecord, ScalingError> {
        if !self.is_base_node(p.source()) || !self.is_base_node(p.target()) {
            return Err(ScalingError::NotBaseEndpoints);
        }
        let nodes: Vec<NodeId> = p.nodes.iter().copied().filter(|&x| x < self.base_n).collect();
        // A detour into a subdivision path and back would repeat a base node.
        let path = PathRecord::from_nodes(g, &nodes)?;
        if path.edges.iter().map(|&e| self.lengths[e]).sum::<u64>() as usize != p.hops() {
            return Err(ScalingError::NotBaseEndpoints);
        }
        Ok(path)
    }
}
