//! Exact minimum weight cycle, brute-force enumeration and unweighted girth.

use crate::graph::{dijkstra_by, CycleRecord, Dist, EdgeId, NodeId, WeightedGraph};

/// Largest graph accepted by [`enumerate_cycles_bruteforce`].
pub const BRUTEFORCE_MAX_NODES: usize = 12;

#[derive(Debug, thiserror::Error)]
pub enum CycleError {
    #[error("brute-force enumeration is limited to {BRUTEFORCE_MAX_NODES} nodes, got {0}")]
    TooLarge(usize),
}

/// A minimum weight cycle, or `None` when the graph is acyclic.
///
/// Undirected: for each edge `(u, v)`, the shortest `u`-`v` path avoiding it
/// closes a cycle. Directed: for each arc `u -> v`, the shortest `v -> u` path.
pub fn exact_mwc(g: &WeightedGraph) -> Option<CycleRecord> {
    let mut best: Option<(u128, EdgeId, Vec<NodeId>)> = None;
    for (id, e) in g.edges().iter().enumerate() {
        let (from, to, skip) = if g.is_directed() {
            (e.v, e.u, None)
        } else {
            (e.u, e.v, Some(id))
        };
        let cutoff = best.as_ref().map(|b| b.0);
        let t = dijkstra_by(g, [(from, 0u128)], |k, _, w| k + w as u128, skip, cutoff);
        let Some(d) = t.key[to] else { continue };
        let total = d + e.w as u128;
        if best.as_ref().is_none_or(|b| total < b.0) {
            best = Some((total, id, t.path_to(to).unwrap()));
        }
    }
    best.map(|(_, _, path)| CycleRecord::from_nodes(g, &path).expect("path plus closing edge"))
}

pub fn exact_mwc_weight(g: &WeightedGraph) -> Dist {
    Dist::from_option(exact_mwc(g).map(|c| c.weight))
}

/// Minimum cycle weight by exhaustive simple-cycle search (small graphs only).
pub fn enumerate_cycles_bruteforce(g: &WeightedGraph) -> Result<Dist, CycleError> {
    if g.n() > BRUTEFORCE_MAX_NODES {
        return Err(CycleError::TooLarge(g.n()));
    }
    let min_len = if g.is_directed() { 2 } else { 3 };
    let mut best: Option<u128> = None;
    let mut on_path = vec![false; g.n()];
    // Each cycle is found from its smallest node.
    for s in 0..g.n() {
        on_path[s] = true;
        extend(g, s, s, 1, 0, min_len, &mut on_path, &mut best);
        on_path[s] = false;
    }
    Ok(Dist::from_option(best))
}

#[allow(clippy::too_many_arguments)]
fn extend(
    g: &WeightedGraph,
    start: NodeId,
    at: NodeId,
    len: usize,
    weight: u128,
    min_len: usize,
    on_path: &mut [bool],
    best: &mut Option<u128>,
) {
    for &(v, e) in g.out_neighbors(at) {
        let w = weight + g.edge(e).w as u128;
        if best.is_some_and(|b| w >= b) {
            continue;
        }
        if v == start {
            if len >= min_len {
                *best = Some(w);
            }
        } else if v > start && !on_path[v] {
            on_path[v] = true;
            extend(g, start, v, len + 1, w, min_len, on_path, best);
            on_path[v] = false;
        }
    }
}

/// Length of a shortest cycle ignoring weights, or `None` when acyclic.
pub fn girth_unweighted(g: &WeightedGraph) -> Option<usize> {
    let unit = g.unit_weights();
    exact_mwc(&unit).map(|c| c.hops())
}
