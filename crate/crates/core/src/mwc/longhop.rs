//! Cycles with many hops: decompose around a random skeleton and close
//! cycles either through a non-tree edge inside a cluster or through an
//! estimation path between two skeleton nodes of one cluster.

use std::sync::OnceLock;

use rand::Rng;

use super::witness::{closed_walk, Closure, Witness};
use super::{MwcError, MwcParams, TrialOutcome};
use crate::congest::{charge_sssp_cost, sssp_round_bound, CostLedger};
use crate::graph::{NodeId, WeightedGraph};
use crate::hop_sssp::{condensed_source, ScaleGrid, SourceProbe};
use crate::ldd::{mssp_tree, ClusterForest, Perturbation, ShiftAssignment};

pub(crate) const PHASE_BROADCAST: &str = "longhop/broadcast";
pub(crate) const PHASE_FOREST: &str = "longhop/forest";
pub(crate) const PHASE_EXCHANGE: &str = "longhop/exchange";
pub(crate) const PHASE_PAIRS: &str = "longhop/pairs";
pub(crate) const PHASE_AGGREGATE: &str = "longhop/aggregate";

/// Hop-bounded estimates from every node, computed on first use.
///
/// They depend only on the graph and the hop bound, so trials share them and
/// apply their own forest marking afterwards.
pub struct PairCache {
    grid: ScaleGrid,
    probes: Vec<OnceLock<SourceProbe>>,
}

impl PairCache {
    pub fn new(g: &WeightedGraph, params: &MwcParams) -> Result<Self, MwcError> {
        let grid = ScaleGrid::new(g.n(), g.max_weight(), params.pair_hops, params.long_step)?;
        Ok(PairCache {
            grid,
            probes: (0..g.n()).map(|_| OnceLock::new()).collect(),
        })
    }

    pub fn grid(&self) -> &ScaleGrid {
        &self.grid
    }

    pub fn probe(&self, g: &WeightedGraph, s: NodeId) -> &SourceProbe {
        self.probes[s].get_or_init(|| condensed_source(g, s, &self.grid))
    }
}

/// Each node independently with the skeleton probability.
pub fn sample_skeleton<R: Rng + ?Sized>(n: usize, p: f64, rng: &mut R) -> Vec<NodeId> {
    (0..n).filter(|_| rng.random::<f64>() < p).collect()
}

/// One trial with a freshly sampled skeleton.
pub fn algo_longhop<R: Rng + ?Sized>(
    g: &WeightedGraph,
    params: &MwcParams,
    cache: &PairCache,
    diameter: usize,
    rng: &mut R,
    ledger: &mut CostLedger,
) -> Result<TrialOutcome, MwcError> {
    let skeleton = sample_skeleton(g.n(), params.skeleton_prob, rng);
    longhop_with_skeleton(g, params, cache, &skeleton, diameter, rng, ledger)
}

fn candidate(best: &Option<(f64, Witness)>, value: f64) -> bool {
    best.as_ref().is_none_or(|(b, _)| value < *b)
}

fn dist_of(f: &ClusterForest, v: NodeId) -> u128 {
    f.dist[v].finite().expect("clustered nodes have finite distance")
}

/// One trial on a given skeleton (sorted, distinct).
pub fn longhop_with_skeleton<R: Rng + ?Sized>(
    g: &WeightedGraph,
    params: &MwcParams,
    cache: &PairCache,
    skeleton: &[NodeId],
    diameter: usize,
    rng: &mut R,
    ledger: &mut CostLedger,
) -> Result<TrialOutcome, MwcError> {
    let mut out = TrialOutcome::default();
    if skeleton.is_empty() {
        return Ok(out);
    }
    let m = g.m();
    let s_len = skeleton.len() as f64;
    let t = sssp_round_bound(g.n(), diameter);
    let q = libm::pow(params.alpha, 1.0 / (2.0 * params.k)).clamp(1.0, t);
    let (forest_dilation, forest_congestion) = charge_sssp_cost(g.n(), diameter, q)?;
    let exchange = vec![2u64; 2 * m];
    let mut pair_messages = vec![0u64; 2 * m];
    for &s in skeleton {
        for (acc, &x) in pair_messages.iter_mut().zip(&cache.probe(g, s).channel_messages) {
            *acc += x;
        }
    }

    for (l, &d) in params.long_grid().iter().enumerate() {
        let shifts = ShiftAssignment::draw(skeleton, params.k, d, rng)?;
        let pert = Perturbation::random(m, rng);
        out.ldd_runs += 1;
        ledger.charge_model(PHASE_BROADCAST, diameter as f64, s_len);
        if shifts.failed() {
            out.failed_runs += 1;
            continue;
        }
        let f = mssp_tree(g, &shifts.start_ticks(), &pert);
        let max_delta = shifts.max_delta();
        out.radius_violations += skeleton
            .iter()
            .filter(|&&u| f.dist[u].finite().is_none_or(|x| x as f64 > max_delta))
            .count() as u64;
        // plain distances and one perturbed run
        ledger.charge_model(PHASE_FOREST, forest_dilation, forest_congestion);
        ledger.charge_model(PHASE_FOREST, forest_dilation, forest_congestion);
        ledger.record_run(PHASE_EXCHANGE, 1, &exchange);
        ledger.record_run(PHASE_PAIRS, cache.grid().scaled_hop_bound, &pair_messages);
        ledger.charge_model(PHASE_AGGREGATE, diameter as f64, 2.0);

        let tree = f.tree_edge_mask(m);
        // non-tree edges inside a cluster
        for (e, edge) in g.edges().iter().enumerate() {
            if tree[e] {
                continue;
            }
            let (Some(cu), Some(cv)) = (f.center[edge.u], f.center[edge.v]) else { continue };
            if cu != cv {
                continue;
            }
            let value = (dist_of(&f, edge.u) + dist_of(&f, edge.v) + edge.w as u128) as f64;
            if candidate(&out.estimate, value) {
                let walk = closed_walk(
                    &f.path_from_center(edge.u).unwrap(),
                    &[edge.u, edge.v],
                    &f.path_from_center(edge.v).unwrap(),
                );
                out.estimate = Some((
                    value,
                    Witness {
                        center: cu,
                        closure: Closure::Edge(e),
                        d,
                        iteration: l,
                        walk,
                    },
                ));
            }
        }
        // estimation paths that leave the forest
        for &u in skeleton {
            let Some(c) = f.center[u] else { continue };
            let probe = cache.probe(g, u);
            for &v in skeleton {
                if v == u || f.center[v] != Some(c) {
                    continue;
                }
                let Some(est) = &probe.best[v] else { continue };
                if probe.record_for(v, est, &tree) {
                    continue;
                }
                let value = (dist_of(&f, u) + dist_of(&f, v)) as f64 + est.value;
                if candidate(&out.estimate, value) {
                    let walk = closed_walk(
                        &f.path_from_center(u).unwrap(),
                        &est.path,
                        &f.path_from_center(v).unwrap(),
                    );
                    out.estimate = Some((
                        value,
                        Witness {
                            center: c,
                            closure: Closure::Pair(u, v),
                            d,
                            iteration: l,
                            walk,
                        },
                    ));
                }
            }
        }
    }
    Ok(out)
}

/// Segment classes of a cycle cut at its skeleton nodes, relative to the
/// cluster of the first skeleton node on the cycle.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SegmentType {
    /// Every edge is a tree edge of that cluster.
    Tree,
    /// Every node is in that cluster and some edge is not a tree edge.
    Closing,
    /// Anything else.
    Other,
}

/// Classifies the segments of `cycle` (node list, no repeat) between
/// consecutive skeleton nodes. Empty when the cycle holds no skeleton node.
pub fn classify_segments(
    g: &WeightedGraph,
    forest: &ClusterForest,
    cycle: &[NodeId],
    skeleton: &[NodeId],
) -> Vec<SegmentType> {
    let tree = forest.tree_edge_mask(g.m());
    let is_skeleton = |v: &NodeId| skeleton.binary_search(v).is_ok();
    let Some(start) = cycle.iter().position(is_skeleton) else {
        return Vec::new();
    };
    let c = forest.center[cycle[start]];
    let len = cycle.len();
    let mut out = Vec::new();
    let (mut inside, mut all_tree) = (c.is_some(), true);
    for i in 0..len {
        let a = cycle[(start + i) % len];
        let b = cycle[(start + i + 1) % len];
        let e = g.edge_between(a, b).expect("cycle edge");
        inside &= forest.center[b] == c;
        all_tree &= tree[e];
        if is_skeleton(&b) {
            out.push(match (inside, all_tree) {
                (true, true) => SegmentType::Tree,
                (true, false) => SegmentType::Closing,
                _ => SegmentType::Other,
            });
            inside = c.is_some() && forest.center[b] == c;
            all_tree = true;
        }
    }
    out
}
