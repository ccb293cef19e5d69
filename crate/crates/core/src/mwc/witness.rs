use std::collections::BTreeMap;

use serde::Serialize;

use crate::graph::{dijkstra_by, CycleRecord, EdgeId, NodeId, WeightedGraph};

/// What closed the cycle in the trial that produced an estimate.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub enum Closure {
    /// A non-tree edge inside one cluster.
    Edge(EdgeId),
    /// A pair of skeleton nodes joined by an estimation path.
    Pair(NodeId, NodeId),
}

/// Data defining a detected cycle.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Witness {
    pub center: NodeId,
    pub closure: Closure,
    /// Distance guess of the iteration.
    pub d: f64,
    pub iteration: usize,
    /// Closed walk in the base graph, first node repeated at the end.
    pub walk: Vec<NodeId>,
}

/// Concatenates the center-to-`a` path, the bridge from `a` to `b` and the
/// reversed center-to-`b` path into a closed walk.
pub(crate) fn closed_walk(to_a: &[NodeId], bridge: &[NodeId], to_b: &[NodeId]) -> Vec<NodeId> {
    let mut walk = to_a.to_vec();
    walk.extend_from_slice(&bridge[1..]);
    walk.extend(to_b.iter().rev().skip(1));
    walk
}

/// A simple cycle whose edges all lie on `walk`, if the walk has an edge it
/// traverses exactly once. Its weight never exceeds the walk's.
pub fn cycle_in_walk(g: &WeightedGraph, walk: &[NodeId]) -> Option<CycleRecord> {
    if walk.len() < 2 || walk.first() != walk.last() {
        return None;
    }
    let mut uses: BTreeMap<EdgeId, usize> = BTreeMap::new();
    for w in walk.windows(2) {
        let e = g.edge_between(w[0], w[1])?;
        *uses.entry(e).or_default() += 1;
    }
    let (&once, _) = uses.iter().find(|(_, &c)| c == 1)?;
    // The rest of the walk joins the endpoints of `once`; take the lightest route.
    let mut sub = WeightedGraph::relaxed(g.n(), g.is_directed());
    for &e in uses.keys().filter(|&&e| e != once) {
        let edge = g.edge(e);
        sub.add_edge(edge.u, edge.v, edge.w).ok()?;
    }
    let edge = g.edge(once);
    let (from, to) = (edge.v, edge.u);
    let t = dijkstra_by(&sub, [(from, 0u128)], |k, _, w| k + w as u128, None, None);
    let path = t.path_to(to)?;
    CycleRecord::from_nodes(g, &path).ok()
}
