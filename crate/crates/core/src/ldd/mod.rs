//! Low diameter decomposition by exponentially shifted start times.
//!
//! Each source `u` draws `delta_u ~ Exp(ln|S| / (k d))` and starts a
//! shortest path exploration at time `X - delta_u` with `X = 100 k d`. Every
//! node joins the first exploration to arrive, which yields a forest of
//! shortest path trees, one per surviving center.

mod forest;
mod shifts;

pub use forest::{mssp_tree, mssp_tree_with_lengths, sssp_tree, ClusterForest, Perturbation, SsspTree};
pub use shifts::{
    exponential_from_uniform, from_ticks, log_size, max_secondmax_gap_stat, sample_exponential, to_ticks,
    ShiftAssignment, ShiftError, GAP_STAT_MIN_TRIALS, TICKS_PER_UNIT,
};

use rand::Rng;

use crate::graph::{distances, CycleRecord, Dist, NodeId, WeightedGraph};

#[derive(Debug, thiserror::Error)]
pub enum LddError {
    #[error(transparent)]
    Shift(#[from] ShiftError),
    #[error("source set is empty")]
    NoSources,
    #[error("source {0} is not a node of the graph")]
    BadSource(NodeId),
    #[error("the reference cycle contains no source")]
    CycleMissesSources,
    #[error("the decomposition failed, so there is nothing to check")]
    FailedRun,
}

/// Result of one decomposition. `forest` is `None` when the run failed
/// because some shift reached the horizon.
#[derive(Clone, Debug)]
pub struct LddOutcome {
    pub shifts: ShiftAssignment,
    pub forest: Option<ClusterForest>,
}

impl LddOutcome {
    pub fn failed(&self) -> bool {
        self.forest.is_none()
    }
}

fn validate_sources(g: &WeightedGraph, sources: &[NodeId]) -> Result<Vec<NodeId>, LddError> {
    if sources.is_empty() {
        return Err(LddError::NoSources);
    }
    if let Some(&bad) = sources.iter().find(|&&u| u >= g.n()) {
        return Err(LddError::BadSource(bad));
    }
    let mut s = sources.to_vec();
    s.sort_unstable();
    s.dedup();
    Ok(s)
}

/// Grows clusters for already drawn shifts.
pub fn grow_clusters(g: &WeightedGraph, shifts: &ShiftAssignment, pert: &Perturbation) -> LddOutcome {
    let forest = (!shifts.failed()).then(|| mssp_tree(g, &shifts.start_ticks(), pert));
    LddOutcome {
        shifts: shifts.clone(),
        forest,
    }
}

/// One decomposition with fresh shifts and perturbation drawn from `rng`.
pub fn ldd<R: Rng + ?Sized>(
    g: &WeightedGraph,
    sources: &[NodeId],
    k: f64,
    d: f64,
    rng: &mut R,
) -> Result<LddOutcome, LddError> {
    let sources = validate_sources(g, sources)?;
    let shifts = ShiftAssignment::draw(&sources, k, d, rng)?;
    let pert = Perturbation::random(g.m(), rng);
    Ok(grow_clusters(g, &shifts, &pert))
}

/// `(1 + eps_S) (k + 1) d` with `eps_S = k / (k + 1) / ln|S|`.
pub fn property_bound(k: f64, d: f64, num_sources: usize) -> f64 {
    let eps = k / (k + 1.0) / log_size(num_sources);
    (1.0 + eps) * (k + 1.0) * d
}

/// Checks the two decomposition properties against a fixed cycle.
///
/// I: every source is clustered within `property_bound` of its center.
/// II: one cluster holds every source on the cycle, and its center is
/// within `property_bound - d` of the nearest of them.
pub fn check_ldd_properties(
    g: &WeightedGraph,
    k: f64,
    d: f64,
    outcome: &LddOutcome,
    cycle: &CycleRecord,
) -> Result<(bool, bool), LddError> {
    let forest = outcome.forest.as_ref().ok_or(LddError::FailedRun)?;
    let sources = &outcome.shifts.sources;
    let bound = property_bound(k, d, sources.len());
    let on_cycle: Vec<NodeId> = cycle.nodes.iter().copied().filter(|v| sources.binary_search(v).is_ok()).collect();
    if on_cycle.is_empty() {
        return Err(LddError::CycleMissesSources);
    }
    let mut dist_cache = std::collections::HashMap::new();
    let mut dist_from = |c: NodeId, v: NodeId| -> Dist { dist_cache.entry(c).or_insert_with(|| distances(g, c))[v] };

    let prop1 = sources.iter().all(|&u| match forest.center[u] {
        Some(c) => dist_from(c, u).finite().is_some_and(|d| d as f64 <= bound),
        None => false,
    });

    let c = forest.center[on_cycle[0]];
    let prop2 = match c {
        Some(c) if on_cycle.iter().all(|&v| forest.center[v] == Some(c)) => {
            let near = on_cycle.iter().filter_map(|&v| dist_from(c, v).finite()).min();
            near.is_some_and(|near| near as f64 + d <= bound)
        }
        _ => false,
    };
    Ok((prop1, prop2))
}

/// Number of sources whose distance to their center exceeds the largest shift.
pub fn radius_violations(outcome: &LddOutcome) -> usize {
    let Some(forest) = &outcome.forest else { return 0 };
    let max_delta = outcome.shifts.max_delta();
    outcome
        .shifts
        .sources
        .iter()
        .filter(|&&u| match forest.dist[u] {
            Dist::Finite(d) => d as f64 > max_delta,
            Dist::Infinite => true,
        })
        .count()
}
