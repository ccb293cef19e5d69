use std::collections::BTreeMap;

use rand::Rng;

use super::shifts::TICKS_PER_UNIT;
use crate::graph::{dijkstra, dijkstra_by, Dist, EdgeId, NodeId, WeightedGraph};

const TICK: u128 = TICKS_PER_UNIT as u128;

/// Per-edge tie-breaking keys. Path keys are sums of edge keys and only
/// matter between paths of equal length.
#[derive(Clone, Debug)]
pub struct Perturbation {
    keys: Vec<u128>,
}

impl Perturbation {
    /// Independent keys uniform in `[1, 2^63)`.
    pub fn random<R: Rng + ?Sized>(m: usize, rng: &mut R) -> Self {
        Perturbation {
            keys: (0..m).map(|_| rng.random_range(1..1u64 << 63) as u128).collect(),
        }
    }

    pub fn from_keys(keys: Vec<u128>) -> Self {
        Perturbation { keys }
    }

    pub fn key(&self, e: EdgeId) -> u128 {
        self.keys[e]
    }

    pub fn len(&self) -> usize {
        self.keys.len()
    }

    pub fn is_empty(&self) -> bool {
        self.keys.is_empty()
    }
}

/// A shortest path tree with a unique parent per node.
#[derive(Clone, Debug)]
pub struct SsspTree {
    pub source: NodeId,
    pub dist: Vec<Dist>,
    pub parent: Vec<Option<(NodeId, EdgeId)>>,
    pub children: Vec<Vec<NodeId>>,
}

/// Picks, for every reached non-root `u`, the in-neighbour `v` whose key
/// extended along `(v, u)` equals the key of `u`; smallest id on collisions.
fn local_parents<K: Copy + Eq>(
    g: &WeightedGraph,
    key: &[Option<K>],
    is_root: impl Fn(NodeId) -> bool,
    extend: impl Fn(K, EdgeId, u64) -> K,
) -> (Vec<Option<(NodeId, EdgeId)>>, Vec<Vec<NodeId>>) {
    let n = g.n();
    let mut parent = vec![None; n];
    let mut children = vec![Vec::new(); n];
    for u in 0..n {
        let Some(ku) = key[u] else { continue };
        if is_root(u) {
            continue;
        }
        let best = g
            .in_neighbors(u)
            .iter()
            .filter(|&&(v, e)| key[v].is_some_and(|kv| extend(kv, e, g.edge(e).w) == ku))
            .min()
            .copied();
        let (v, e) = best.expect("a reached node has a tight in-neighbour");
        parent[u] = Some((v, e));
        children[v].push(u);
    }
    (parent, children)
}

/// Shortest path tree from `s`, made unique by the perturbation.
///
/// Distances come from one run on the original weights and one on the
/// perturbed weights; each node then selects its parent locally.
pub fn sssp_tree(g: &WeightedGraph, s: NodeId, pert: &Perturbation) -> SsspTree {
    let plain = dijkstra(g, &[(s, 0)]);
    let extend = |(p, q): (u128, u128), e: EdgeId, w: u64| (p + w as u128, q + pert.key(e));
    let perturbed = dijkstra_by(g, [(s, (0u128, 0u128))], extend, None, None);
    debug_assert!(plain
        .key
        .iter()
        .zip(&perturbed.key)
        .all(|(a, b)| *a == b.map(|k| k.0)));
    let (parent, children) = local_parents(g, &perturbed.key, |u| u == s, extend);
    SsspTree {
        source: s,
        dist: plain.key.into_iter().map(Dist::from_option).collect(),
        parent,
        children,
    }
}

/// Clusters grown from sources with individual start times.
#[derive(Clone, Debug)]
pub struct ClusterForest {
    pub center: Vec<Option<NodeId>>,
    /// Distance from the node's center.
    pub dist: Vec<Dist>,
    pub parent: Vec<Option<(NodeId, EdgeId)>>,
    pub children: Vec<Vec<NodeId>>,
    /// First arrival time in ticks.
    pub arrival: Vec<Option<u128>>,
}

impl ClusterForest {
    pub fn n(&self) -> usize {
        self.center.len()
    }

    /// `mask[e]` is true iff `e` is the parent edge of some node.
    pub fn tree_edge_mask(&self, m: usize) -> Vec<bool> {
        let mut mask = vec![false; m];
        for &(_, e) in self.parent.iter().flatten() {
            mask[e] = true;
        }
        mask
    }

    /// Nodes from the center of `v` down to `v`.
    pub fn path_from_center(&self, v: NodeId) -> Option<Vec<NodeId>> {
        self.center[v]?;
        let mut p = vec![v];
        let mut x = v;
        while let Some((y, _)) = self.parent[x] {
            p.push(y);
            x = y;
        }
        p.reverse();
        Some(p)
    }

    /// Members of each cluster, keyed by center.
    pub fn clusters(&self) -> BTreeMap<NodeId, Vec<NodeId>> {
        let mut out: BTreeMap<NodeId, Vec<NodeId>> = BTreeMap::new();
        for (v, c) in self.center.iter().enumerate() {
            if let Some(c) = c {
                out.entry(*c).or_default().push(v);
            }
        }
        out
    }
}

/// Grows one shortest path tree per source from a virtual root joined to
/// source `u` with length `start_u` (in ticks); every node joins the first
/// tree to reach it.
///
/// Ties on arrival time are broken by the perturbation and then by the
/// smaller center id, so the forest is unique.
pub fn mssp_tree(g: &WeightedGraph, starts: &[(NodeId, u128)], pert: &Perturbation) -> ClusterForest {
    mssp_tree_with_lengths(g, None, starts, pert)
}

/// [`mssp_tree`] with `lengths[e]` replacing the weight of edge `e`.
pub fn mssp_tree_with_lengths(
    g: &WeightedGraph,
    lengths: Option<&[u64]>,
    starts: &[(NodeId, u128)],
    pert: &Perturbation,
) -> ClusterForest {
    let n = g.n();
    let len = |e: EdgeId, w: u64| lengths.map_or(w, |l| l[e]) as u128;
    let extend = |(p, q, c): (u128, u128, NodeId), e: EdgeId, w: u64| (p + len(e, w) * TICK, q + pert.key(e), c);
    let seeds: Vec<_> = starts.iter().map(|&(u, t)| (u, (t, 0u128, u))).collect();
    let run = dijkstra_by(g, seeds.iter().copied(), extend, None, None);
    let own_start: BTreeMap<NodeId, u128> = starts.iter().copied().collect();
    let is_root = |u: NodeId| matches!(run.key[u], Some((p, 0, c)) if c == u && own_start.get(&u) == Some(&p));
    let (parent, children) = local_parents(g, &run.key, is_root, extend);
    let mut center = vec![None; n];
    let mut dist = vec![Dist::Infinite; n];
    let mut arrival = vec![None; n];
    for u in 0..n {
        if let Some((p, _, c)) = run.key[u] {
            center[u] = Some(c);
            arrival[u] = Some(p);
            let travelled = p - own_start[&c];
            debug_assert_eq!(travelled % TICK, 0);
            dist[u] = Dist::Finite(travelled / TICK);
        }
    }
    ClusterForest {
        center,
        dist,
        parent,
        children,
        arrival,
    }
}
