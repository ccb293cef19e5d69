#![allow(dead_code)]

use congest_mwc::graph::{Dist, WeightedGraph};
use proptest::prelude::*;

/// Simple graph from a raw edge list, dropping loops and repeated pairs.
pub fn build(n: usize, directed: bool, raw: &[(usize, usize, u64)]) -> WeightedGraph {
    let mut g = WeightedGraph::new(n, directed);
    for &(u, v, w) in raw {
        let (u, v) = (u % n, v % n);
        if u != v && g.edge_between(u, v).is_none() {
            g.add_edge(u, v, w).unwrap();
        }
    }
    g
}

pub fn arb_graph(max_n: usize, max_edges: usize, max_w: u64, directed: bool) -> impl Strategy<Value = WeightedGraph> {
    (3..=max_n).prop_flat_map(move |n| {
        prop::collection::vec((0..n, 0..n, 1..=max_w), 0..=max_edges).prop_map(move |raw| build(n, directed, &raw))
    })
}

/// Bellman-Ford distances, optionally limited to `hops` edges.
pub fn bellman_ford(g: &WeightedGraph, s: usize, hops: Option<usize>) -> Vec<Dist> {
    let mut d: Vec<Option<u128>> = vec![None; g.n()];
    d[s] = Some(0);
    let rounds = hops.unwrap_or(g.n().saturating_sub(1));
    for _ in 0..rounds {
        let prev = d.clone();
        for e in g.edges() {
            let mut relax = |a: usize, b: usize| {
                if let Some(x) = prev[a] {
                    let cand = x + e.w as u128;
                    if d[b].is_none_or(|y| cand < y) {
                        d[b] = Some(cand);
                    }
                }
            };
            relax(e.u, e.v);
            if !g.is_directed() {
                relax(e.v, e.u);
            }
        }
        if d == prev {
            break;
        }
    }
    d.into_iter().map(Dist::from_option).collect()
}
