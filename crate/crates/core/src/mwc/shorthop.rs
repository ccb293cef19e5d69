//! Cycles with few hops: decompose a scaled copy of the graph with every node
//! as a source and close cycles through non-tree edges inside a cluster.

use rand::Rng;

use super::witness::{closed_walk, Closure, Witness};
use super::{MwcError, MwcParams, TrialOutcome};
use crate::congest::CostLedger;
use crate::graph::{Dist, EdgeId, NodeId, WeightedGraph};
use crate::hop_sssp::{scaled_len, Engine};
use crate::ldd::{mssp_tree, mssp_tree_with_lengths, Perturbation, ShiftAssignment, TICKS_PER_UNIT};
use crate::scaling::{graph_scaling, rational_from_f64};

const TICK: u128 = TICKS_PER_UNIT as u128;

pub(crate) const PHASE_LDD: &str = "shorthop/ldd";
pub(crate) const PHASE_EXCHANGE: &str = "shorthop/exchange";
pub(crate) const PHASE_AGGREGATE: &str = "shorthop/aggregate";

/// The clustering of the scaled graph, seen from the base nodes.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ScaledForest {
    pub center: Vec<Option<NodeId>>,
    /// Scaled distance to the center.
    pub dist: Vec<Dist>,
    /// Base node and base edge one step towards the center.
    pub parent: Vec<Option<(NodeId, EdgeId)>>,
    /// Base edges whose whole extending path lies in the forest.
    pub tree: Vec<bool>,
    /// Rounds from the first start until the last scaled node is reached.
    pub rounds: u64,
    /// Messages of the clustering wave per base channel.
    pub channel_messages: Vec<u64>,
}

impl ScaledForest {
    fn path_from_center(&self, v: NodeId) -> Vec<NodeId> {
        let mut p = vec![v];
        let mut x = v;
        while let Some((y, _)) = self.parent[x] {
            p.push(y);
            x = y;
        }
        p.reverse();
        p
    }

    /// Base sources farther from their center than the largest shift.
    pub fn radius_violations(&self, shifts: &ShiftAssignment) -> u64 {
        let max_delta = shifts.max_delta();
        shifts
            .sources
            .iter()
            .filter(|&&u| self.dist[u].finite().is_none_or(|d| d as f64 > max_delta))
            .count() as u64
    }
}

fn rounds_between(first_start: u128, last_arrival: u128) -> u64 {
    (last_arrival - first_start).div_ceil(TICK) as u64
}

/// Grows the clusters of one iteration. Shifts are over the base nodes; the
/// perturbation is over base edges for [`Engine::Condensed`] and over the
/// unit edges of the scaled graph for [`Engine::Faithful`]. The two agree
/// when each base key is the sum of the keys along its extending path.
pub fn scaled_forest(
    g: &WeightedGraph,
    gamma: f64,
    shifts: &ShiftAssignment,
    pert: &Perturbation,
    engine: Engine,
) -> Result<ScaledForest, MwcError> {
    let starts = shifts.start_ticks();
    let first_start = starts.iter().map(|&(_, t)| t).min().unwrap_or(0);
    match engine {
        Engine::Condensed => {
            let lens: Vec<u64> = g.edges().iter().map(|e| scaled_len(e.w, gamma)).collect();
            let f = mssp_tree_with_lengths(g, Some(&lens), &starts, pert);
            let mut last = f.arrival.iter().flatten().copied().max().unwrap_or(first_start);
            let mut channel_messages = vec![0u64; 2 * g.m()];
            for (e, edge) in g.edges().iter().enumerate() {
                let len = lens[e] as u128;
                let (a, b) = (f.arrival[edge.u], f.arrival[edge.v]);
                // latest arrival among the interior nodes of the extending path
                let interior = match (a, b) {
                    (Some(a), Some(b)) => {
                        let best = |p: u128| (a + p * TICK).min(b + (len - p) * TICK);
                        let mid = ((b + len * TICK).saturating_sub(a) / (2 * TICK)).min(len);
                        best(mid).max(best((mid + 1).min(len)))
                    }
                    (Some(x), None) | (None, Some(x)) => x + len * TICK,
                    (None, None) => continue,
                };
                last = last.max(interior);
                channel_messages[2 * e] += 1;
                channel_messages[2 * e + 1] += 1;
            }
            Ok(ScaledForest {
                tree: f.tree_edge_mask(g.m()),
                center: f.center,
                dist: f.dist,
                parent: f.parent,
                rounds: rounds_between(first_start, last),
                channel_messages,
            })
        }
        Engine::Faithful => {
            let scaled = graph_scaling(g, &rational_from_f64(gamma))?;
            let h = &scaled.graph;
            let f = mssp_tree(h, &starts, pert);
            let n = g.n();
            let unit_tree = f.tree_edge_mask(h.m());
            let tree = (0..g.m()).map(|e| scaled.unit_edges(e).all(|u| unit_tree[u])).collect();
            let parent = (0..n)
                .map(|v| {
                    let (mut x, unit) = f.parent[v]?;
                    while !scaled.is_base_node(x) {
                        x = f.parent[x].expect("interior nodes have parents").0;
                    }
                    Some((x, scaled.owner_of_edge(unit)))
                })
                .collect();
            let mut unit_messages = vec![0u64; 2 * h.m()];
            for (u, edge) in h.edges().iter().enumerate() {
                if f.center[edge.u].is_some() {
                    unit_messages[2 * u] += 1;
                }
                if f.center[edge.v].is_some() {
                    unit_messages[2 * u + 1] += 1;
                }
            }
            let last = f.arrival.iter().flatten().copied().max().unwrap_or(first_start);
            Ok(ScaledForest {
                center: f.center[..n].to_vec(),
                dist: f.dist[..n].to_vec(),
                parent,
                tree,
                rounds: rounds_between(first_start, last),
                channel_messages: crate::hop_sssp::fold_to_base(&scaled, g.m(), &unit_messages),
            })
        }
    }
}

/// Lightest `gamma (dist'(c, v) + dist'(c, w)) + w(v, w)` over non-tree
/// edges `(v, w)` inside one cluster; smallest edge id on ties.
pub fn detect(g: &WeightedGraph, forest: &ScaledForest, gamma: f64) -> Option<(f64, EdgeId)> {
    let mut best: Option<(f64, EdgeId)> = None;
    for (e, edge) in g.edges().iter().enumerate() {
        if forest.tree[e] {
            continue;
        }
        let (Some(cu), Some(cv)) = (forest.center[edge.u], forest.center[edge.v]) else { continue };
        if cu != cv {
            continue;
        }
        let (Dist::Finite(du), Dist::Finite(dv)) = (forest.dist[edge.u], forest.dist[edge.v]) else { continue };
        let value = gamma * (du + dv) as f64 + edge.w as f64;
        if best.is_none_or(|(b, _)| value < b) {
            best = Some((value, e));
        }
    }
    best
}

/// Per-edge perturbation for the chosen engine.
fn draw_perturbation<R: Rng + ?Sized>(
    g: &WeightedGraph,
    gamma: f64,
    engine: Engine,
    rng: &mut R,
) -> Result<Perturbation, MwcError> {
    let m = match engine {
        Engine::Condensed => g.m(),
        Engine::Faithful => g.edges().iter().map(|e| scaled_len(e.w, gamma) as usize).sum(),
    };
    Ok(Perturbation::random(m, rng))
}

/// One trial of the short-hop regime: every distance guess, one
/// decomposition each, keeping the lightest detected cycle.
pub fn algo_shorthop<R: Rng + ?Sized>(
    g: &WeightedGraph,
    params: &MwcParams,
    engine: Engine,
    diameter: usize,
    rng: &mut R,
    ledger: &mut CostLedger,
) -> Result<TrialOutcome, MwcError> {
    let mut out = TrialOutcome::default();
    let nodes: Vec<NodeId> = (0..g.n()).collect();
    let scale = params.short_ldd_scale();
    let exchange = vec![2u64; 2 * g.m()];
    for (l, &d) in params.short_grid().iter().enumerate() {
        let gamma = params.short_gamma(d);
        let shifts = ShiftAssignment::draw(&nodes, params.k, scale, rng)?;
        let pert = draw_perturbation(g, gamma, engine, rng)?;
        out.ldd_runs += 1;
        if shifts.failed() {
            out.failed_runs += 1;
            continue;
        }
        let forest = scaled_forest(g, gamma, &shifts, &pert, engine)?;
        out.radius_violations += forest.radius_violations(&shifts);
        ledger.record_run(PHASE_LDD, forest.rounds, &forest.channel_messages);
        ledger.record_run(PHASE_EXCHANGE, 1, &exchange);
        ledger.charge_model(PHASE_AGGREGATE, diameter as f64, 2.0);
        let Some((value, e)) = detect(g, &forest, gamma) else { continue };
        if out.estimate.as_ref().is_some_and(|(b, _)| *b <= value) {
            continue;
        }
        let edge = g.edge(e);
        let center = forest.center[edge.u].unwrap();
        let walk = closed_walk(
            &forest.path_from_center(edge.u),
            &[edge.u, edge.v],
            &forest.path_from_center(edge.v),
        );
        out.estimate = Some((
            value,
            Witness {
                center,
                closure: Closure::Edge(e),
                d,
                iteration: l,
                walk,
            },
        ));
    }
    Ok(out)
}
