//! Hop-bounded distance estimates from BFS on scaled graphs.
//!
//! For each guess `d = (1 + eps/2)^l` the graph is scaled by
//! `gamma = (eps/2) d / r` and explored by BFS for `r' = ceil((1 + 2/eps) r)`
//! hops; the estimate is the smallest `gamma * hops` over all guesses.
//!
//! Two engines produce identical estimates. [`Engine::Faithful`] builds every
//! scaled graph and runs the round-level protocols on it. [`Engine::Condensed`]
//! runs a hop-bounded Dijkstra on the base graph with the scaled lengths and
//! meters the messages that would cross each base edge.

use crate::congest::{modified_hop_bounded_bfs, CostLedger};
use crate::graph::{dijkstra_by, EdgeId, NodeId, PathRecord, WeightedGraph};
use crate::scaling::{graph_scaling, rational_from_f64, ScaledGraph, ScalingError};

#[derive(Debug, thiserror::Error)]
pub enum HopSsspError {
    #[error("hop bound must be at least 1")]
    ZeroHopBound,
    #[error("error parameter must be positive, got {0}")]
    BadEpsilon(f64),
    #[error("source {0} is not a node of the graph")]
    BadSource(NodeId),
    #[error("expected one mark per edge ({expected}), got {got}")]
    MarkCount { expected: usize, got: usize },
    #[error(transparent)]
    Scaling(#[from] ScalingError),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Engine {
    Faithful,
    Condensed,
}

/// The sequence of scaling factors and the scaled hop bound.
#[derive(Clone, Debug)]
pub struct ScaleGrid {
    pub lambda: f64,
    pub sigma: f64,
    pub hop_bound: u64,
    pub scaled_hop_bound: u64,
    pub gammas: Vec<f64>,
}

impl ScaleGrid {
    /// Guesses `d_l = (1 + eps/2)^l` for `l = 0..=ceil(log_{1+eps/2}(n W))`.
    pub fn new(n: usize, max_weight: u64, r: u64, eps: f64) -> Result<Self, HopSsspError> {
        if r == 0 {
            return Err(HopSsspError::ZeroHopBound);
        }
        if !(eps > 0.0 && eps.is_finite()) {
            return Err(HopSsspError::BadEpsilon(eps));
        }
        let lambda = eps / 2.0;
        let sigma = eps / 2.0;
        let top = (n.max(1) as f64) * (max_weight.max(1) as f64);
        let steps = libm::ceil(libm::log(top) / libm::log1p(lambda)).max(0.0) as usize;
        let mut gammas = Vec::with_capacity(steps + 1);
        let mut d = 1.0f64;
        for _ in 0..=steps {
            gammas.push(sigma * d / r as f64);
            d *= 1.0 + lambda;
        }
        let scaled_hop_bound = libm::ceil((1.0 + 1.0 / sigma) * r as f64) as u64;
        Ok(ScaleGrid {
            lambda,
            sigma,
            hop_bound: r,
            scaled_hop_bound,
            gammas,
        })
    }

    pub fn iterations(&self) -> usize {
        self.gammas.len()
    }
}

/// `max(1, ceil(w / gamma))`, exact for any positive finite `gamma`;
/// saturates at `u64::MAX`.
pub fn scaled_len(w: u64, gamma: f64) -> u64 {
    let bits = gamma.to_bits();
    let exp_bits = ((bits >> 52) & 0x7ff) as i32;
    let frac = bits & ((1u64 << 52) - 1);
    let (mant, exp) = if exp_bits == 0 {
        (frac, -1074)
    } else {
        (frac | (1u64 << 52), exp_bits - 1075)
    };
    let (w, mant) = (w as u128, mant as u128);
    let c = if exp >= 64 {
        1
    } else if exp >= 0 {
        w.div_ceil(mant << exp)
    } else if -exp <= 64 {
        (w << -exp).div_ceil(mant)
    } else {
        // w 2^s / mant with s > 64, split as (w 2^64 / mant) 2^(s - 64)
        let shift = (-exp - 64) as u32;
        let (q, r) = ((w << 64) / mant, (w << 64) % mant);
        if shift >= 64 || q >> (64 - shift) != 0 {
            return if w == 0 { 1 } else { u64::MAX };
        }
        (q << shift) + (r << shift).div_ceil(mant)
    };
    c.min(u64::MAX as u128).max(1) as u64
}

/// Estimate for one `(source, node)` pair.
#[derive(Clone, Debug, PartialEq)]
pub struct Estimate {
    /// `gamma * scaled hops` of the winning iteration.
    pub value: f64,
    pub iteration: usize,
    pub scaled_hops: u64,
    /// The estimation path in the base graph, source first.
    pub path: Vec<NodeId>,
    pub path_edges: Vec<EdgeId>,
    /// Whether the tree path stayed inside the marked edges (modified runs only).
    pub record: Option<bool>,
}

#[derive(Clone, Debug)]
pub struct HopSsspResult {
    pub sources: Vec<NodeId>,
    pub grid: ScaleGrid,
    /// `estimates[i][u]` for source `sources[i]`; `None` means infinite.
    pub estimates: Vec<Vec<Option<Estimate>>>,
}

impl HopSsspResult {
    pub fn get(&self, s: NodeId, u: NodeId) -> Option<&Estimate> {
        let i = self.sources.iter().position(|&x| x == s)?;
        self.estimates[i][u].as_ref()
    }
}

/// Estimates `dist^(r)(s, u)` for every source `s` and node `u`.
pub fn bfs_based_sssp(
    g: &WeightedGraph,
    sources: &[NodeId],
    r: u64,
    eps: f64,
    engine: Engine,
    ledger: &mut CostLedger,
) -> Result<HopSsspResult, HopSsspError> {
    run(g, sources, r, eps, None, engine, ledger, "hop_sssp")
}

/// As [`bfs_based_sssp`], also reporting for each pair whether the
/// estimation path lies inside `marked`.
pub fn modified_bfs_based_sssp(
    g: &WeightedGraph,
    sources: &[NodeId],
    r: u64,
    eps: f64,
    marked: &[bool],
    engine: Engine,
    ledger: &mut CostLedger,
) -> Result<HopSsspResult, HopSsspError> {
    if marked.len() != g.m() {
        return Err(HopSsspError::MarkCount {
            expected: g.m(),
            got: marked.len(),
        });
    }
    run(g, sources, r, eps, Some(marked), engine, ledger, "modified_hop_sssp")
}

#[allow(clippy::too_many_arguments)]
fn run(
    g: &WeightedGraph,
    sources: &[NodeId],
    r: u64,
    eps: f64,
    marked: Option<&[bool]>,
    engine: Engine,
    ledger: &mut CostLedger,
    label: &str,
) -> Result<HopSsspResult, HopSsspError> {
    if let Some(&bad) = sources.iter().find(|&&s| s >= g.n()) {
        return Err(HopSsspError::BadSource(bad));
    }
    let grid = ScaleGrid::new(g.n(), g.max_weight(), r, eps)?;
    let estimates = match engine {
        Engine::Condensed => sources
            .iter()
            .map(|&s| {
                let probe = condensed_source(g, s, &grid);
                ledger.record_run(label, grid.scaled_hop_bound, &probe.channel_messages);
                probe.finish(marked)
            })
            .collect(),
        Engine::Faithful => faithful(g, sources, &grid, marked, ledger, label)?,
    };
    Ok(HopSsspResult {
        sources: sources.to_vec(),
        grid,
        estimates,
    })
}

/// Everything one source contributes, before applying an edge marking.
#[derive(Clone, Debug)]
pub struct SourceProbe {
    pub source: NodeId,
    pub best: Vec<Option<Estimate>>,
    /// Messages summed over all iterations, per base channel.
    pub channel_messages: Vec<u64>,
    /// Edges at the source; its own record is true iff one of them is marked.
    incident: Vec<EdgeId>,
}

impl SourceProbe {
    /// Fills in records for `marked` (or clears them when `None`).
    pub fn finish(&self, marked: Option<&[bool]>) -> Vec<Option<Estimate>> {
        self.best
            .iter()
            .enumerate()
            .map(|(u, est)| {
                est.clone().map(|mut e| {
                    e.record = marked.map(|m| self.record_for(u, &e, m));
                    e
                })
            })
            .collect()
    }

    /// The boolean record of node `u` under marking `m`.
    pub fn record_for(&self, u: NodeId, est: &Estimate, m: &[bool]) -> bool {
        if u == self.source {
            self.incident.iter().any(|&e| m[e])
        } else {
            est.path_edges.iter().all(|&e| m[e])
        }
    }
}

fn better(current: &Option<Estimate>, value: f64) -> bool {
    current.as_ref().is_none_or(|c| value < c.value)
}

/// Runs every iteration from `s` with hop-bounded Dijkstra over scaled lengths.
pub fn condensed_source(g: &WeightedGraph, s: NodeId, grid: &ScaleGrid) -> SourceProbe {
    let n = g.n();
    let bound = grid.scaled_hop_bound as u128;
    let mut best: Vec<Option<Estimate>> = vec![None; n];
    let mut channel_messages = vec![0u64; 2 * g.m()];
    for (l, &gamma) in grid.gammas.iter().enumerate() {
        let lens: Vec<u64> = g.edges().iter().map(|e| scaled_len(e.w, gamma)).collect();
        let t = dijkstra_by(g, [(s, 0u128)], |k, e, _| k + lens[e] as u128, None, Some(bound));
        meter_crossings(g, &lens, &t.key, bound, &mut channel_messages);
        for u in 0..n {
            let Some(h) = t.key[u] else { continue };
            let value = gamma * h as f64;
            if better(&best[u], value) {
                let path = t.path_to(u).unwrap();
                let path_edges = (1..path.len()).map(|i| t.parent[path[i]].unwrap().1).collect();
                best[u] = Some(Estimate {
                    value,
                    iteration: l,
                    scaled_hops: h as u64,
                    path,
                    path_edges,
                    record: None,
                });
            }
        }
    }
    SourceProbe {
        source: s,
        best,
        channel_messages,
        incident: g.links(s).into_iter().map(|(_, e)| e).collect(),
    }
}

/// Base edge `e = (u, v)` is simulated by `u` up to position `len / 2` of its
/// extending path and by `v` beyond; only that middle unit edge crosses the
/// real link. A node at scaled distance below the bound transmits once.
fn meter_crossings(g: &WeightedGraph, lens: &[u64], dist: &[Option<u128>], bound: u128, out: &mut [u64]) {
    for (e, edge) in g.edges().iter().enumerate() {
        let len = lens[e] as u128;
        let mid = len / 2;
        let at = |pos: u128| -> Option<u128> {
            let a = dist[edge.u].map(|d| d + pos);
            let b = dist[edge.v].map(|d| d + len - pos);
            match (a, b) {
                (Some(a), Some(b)) => Some(a.min(b)),
                (x, y) => x.or(y),
            }
        };
        if at(mid).is_some_and(|d| d < bound) {
            out[2 * e] += 1;
        }
        if at(mid + 1).is_some_and(|d| d < bound) {
            out[2 * e + 1] += 1;
        }
    }
}

/// Maps per-channel counts of a scaled graph onto the base channels that
/// its middle unit edges cross.
pub fn fold_to_base(scaled: &ScaledGraph, base_m: usize, scaled_counts: &[u64]) -> Vec<u64> {
    let mut out = vec![0u64; 2 * base_m];
    for e in 0..base_m {
        let f = scaled.unit_edges(e).start + (scaled.length(e) / 2) as usize;
        out[2 * e] += scaled_counts[2 * f];
        out[2 * e + 1] += scaled_counts[2 * f + 1];
    }
    out
}

fn faithful(
    g: &WeightedGraph,
    sources: &[NodeId],
    grid: &ScaleGrid,
    marked: Option<&[bool]>,
    ledger: &mut CostLedger,
    label: &str,
) -> Result<Vec<Vec<Option<Estimate>>>, HopSsspError> {
    let n = g.n();
    let all_marked = vec![true; g.m()];
    let base_marks = marked.unwrap_or(&all_marked);
    let mut best: Vec<Vec<Option<Estimate>>> = vec![vec![None; n]; sources.len()];
    for (l, &gamma) in grid.gammas.iter().enumerate() {
        let scaled = graph_scaling(g, &rational_from_f64(gamma))?;
        let h = &scaled.graph;
        let unit_marks: Vec<bool> = (0..h.m()).map(|f| base_marks[scaled.owner_of_edge(f)]).collect();
        for (i, &s) in sources.iter().enumerate() {
            let mut local = CostLedger::new(h.m());
            let tree = modified_hop_bounded_bfs(h, s, grid.scaled_hop_bound, &unit_marks, &mut local, "bfs");
            let phase = local.phase("bfs").unwrap();
            ledger.record_run(label, phase.rounds, &fold_to_base(&scaled, g.m(), &phase.channel_messages));
            for u in 0..n {
                let Some(hops) = tree.tree.dist[u].finite() else { continue };
                let value = gamma * hops as f64;
                if better(&best[i][u], value) {
                    let lifted = PathRecord::from_nodes(h, &tree.tree.path_to(u).unwrap())
                        .expect("tree paths are paths");
                    let base = scaled.prescale_path(g, &lifted)?;
                    best[i][u] = Some(Estimate {
                        value,
                        iteration: l,
                        scaled_hops: hops as u64,
                        path: base.nodes,
                        path_edges: base.edges,
                        record: marked.and(tree.record[u]),
                    });
                }
            }
        }
    }
    Ok(best)
}
