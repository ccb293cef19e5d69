//! The two-regime approximation of the minimum weight cycle.
//!
//! Short-hop trials catch a minimum cycle with at most `h0` hops, long-hop
//! trials one with more; the driver runs both and keeps the lightest
//! estimate. Every finite estimate comes with a closed walk in the graph
//! whose weight is at most the estimate, so estimates never undershoot.

mod longhop;
mod params;
mod shorthop;
mod witness;

pub use longhop::{algo_longhop, classify_segments, longhop_with_skeleton, sample_skeleton, PairCache, SegmentType};
pub use params::{d_grid, min_eps, MwcParams};
pub use shorthop::{algo_shorthop, detect, scaled_forest, ScaledForest};
pub use witness::{cycle_in_walk, Closure, Witness};

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::congest::{CostLedger, CostModelError};
use crate::graph::{hop_diameter, CycleRecord, WeightedGraph};
use crate::hop_sssp::{Engine, HopSsspError};
use crate::ldd::ShiftError;
use crate::scaling::ScalingError;

#[derive(Debug, thiserror::Error)]
pub enum MwcError {
    #[error("the regimes need at least 3 nodes, got {0}")]
    TooSmall(usize),
    #[error("k* must be a finite number >= 1, got {0}")]
    BadKStar(f64),
    #[error("alpha = {alpha} outside [1, {max}]")]
    BadAlpha { alpha: f64, max: f64 },
    #[error("eps = {eps} outside [{min}, 1)")]
    BadEps { eps: f64, min: f64 },
    #[error("only undirected graphs are supported")]
    Directed,
    #[error(transparent)]
    Shift(#[from] ShiftError),
    #[error(transparent)]
    HopSssp(#[from] HopSsspError),
    #[error(transparent)]
    Scaling(#[from] ScalingError),
    #[error(transparent)]
    CostModel(#[from] CostModelError),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Regime {
    Shorthop,
    Longhop,
}

impl Regime {
    pub fn as_str(self) -> &'static str {
        match self {
            Regime::Shorthop => "shorthop",
            Regime::Longhop => "longhop",
        }
    }
}

/// What a single trial of either regime produced.
#[derive(Clone, Debug, Default)]
pub struct TrialOutcome {
    pub estimate: Option<(f64, Witness)>,
    pub ldd_runs: u64,
    pub failed_runs: u64,
    pub radius_violations: u64,
}

/// The lightest estimate of one trial.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct MwcEstimate {
    pub w_tilde: f64,
    pub witness: Witness,
    pub regime: Regime,
    pub trial: u64,
}

impl MwcEstimate {
    /// The cycle inside the witness walk, if it exists and is no heavier
    /// than the estimate.
    pub fn validate(&self, g: &WeightedGraph) -> Option<CycleRecord> {
        cycle_in_walk(g, &self.witness.walk).filter(|c| c.weight as f64 <= self.w_tilde)
    }
}

#[derive(Clone, Debug)]
pub struct MwcConfig {
    pub seed: u64,
    /// Upper limit on the trials of each regime.
    pub trial_cap: Option<u64>,
    pub alpha: Option<f64>,
    pub eps: Option<f64>,
    pub engine: Engine,
}

impl MwcConfig {
    pub fn new(seed: u64) -> Self {
        MwcConfig {
            seed,
            trial_cap: None,
            alpha: None,
            eps: None,
            engine: Engine::Condensed,
        }
    }
}

#[derive(Clone, Debug)]
pub struct MwcResult {
    /// `None` when the graph has fewer than 3 nodes and no trial ran.
    pub params: Option<MwcParams>,
    pub best: Option<MwcEstimate>,
    pub short_trials: u64,
    pub long_trials: u64,
    /// Trials in which at least one decomposition failed.
    pub failed_trials: u64,
    pub ldd_runs: u64,
    pub radius_violations: u64,
    pub ledger: CostLedger,
}

impl MwcResult {
    pub fn w_tilde(&self) -> Option<f64> {
        self.best.as_ref().map(|b| b.w_tilde)
    }

    pub fn trials_run(&self) -> u64 {
        self.short_trials + self.long_trials
    }
}

/// Independent stream for one trial of one regime.
pub fn trial_rng(seed: u64, regime: Regime, trial: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let tag = match regime {
        Regime::Shorthop => 0,
        Regime::Longhop => 1u64 << 62,
    };
    rng.set_stream(tag | trial);
    rng
}

const CHUNK: u64 = 32;

/// Approximates the minimum cycle weight within a factor `k* + 1` with high
/// probability. `None` as the estimate means no cycle was found.
pub fn approx_mwc(g: &WeightedGraph, k_star: f64, cfg: &MwcConfig) -> Result<MwcResult, MwcError> {
    if g.is_directed() {
        return Err(MwcError::Directed);
    }
    let mut result = MwcResult {
        params: None,
        best: None,
        short_trials: 0,
        long_trials: 0,
        failed_trials: 0,
        ldd_runs: 0,
        radius_violations: 0,
        ledger: CostLedger::new(g.m()),
    };
    if g.n() < 3 {
        if !(k_star >= 1.0 && k_star.is_finite()) {
            return Err(MwcError::BadKStar(k_star));
        }
        return Ok(result);
    }
    let params = MwcParams::new(g.n(), g.max_weight(), k_star, cfg.alpha, cfg.eps)?;
    let diameter = hop_diameter(g).0;
    let cache = PairCache::new(g, &params)?;
    let plan = [
        (Regime::Shorthop, params.short_trials(cfg.trial_cap)),
        (Regime::Longhop, params.long_trials(cfg.trial_cap)),
    ];
    for (regime, trials) in plan {
        let mut start = 0;
        while start < trials {
            let end = (start + CHUNK).min(trials);
            let chunk: Vec<(TrialOutcome, CostLedger)> = (start..end)
                .into_par_iter()
                .map(|t| {
                    let mut rng = trial_rng(cfg.seed, regime, t);
                    let mut ledger = CostLedger::new(g.m());
                    let out = match regime {
                        Regime::Shorthop => algo_shorthop(g, &params, cfg.engine, diameter, &mut rng, &mut ledger),
                        Regime::Longhop => algo_longhop(g, &params, &cache, diameter, &mut rng, &mut ledger),
                    }?;
                    Ok((out, ledger))
                })
                .collect::<Result<_, MwcError>>()?;
            for (t, (out, ledger)) in (start..end).zip(chunk) {
                result.ledger.absorb(&ledger);
                result.ldd_runs += out.ldd_runs;
                result.failed_trials += (out.failed_runs > 0) as u64;
                result.radius_violations += out.radius_violations;
                if let Some((w_tilde, witness)) = out.estimate {
                    if result.best.as_ref().is_none_or(|b| w_tilde < b.w_tilde) {
                        result.best = Some(MwcEstimate {
                            w_tilde,
                            witness,
                            regime,
                            trial: t,
                        });
                    }
                }
            }
            start = end;
        }
        match regime {
            Regime::Shorthop => result.short_trials = trials,
            Regime::Longhop => result.long_trials = trials,
        }
    }
    result.params = Some(params);
    Ok(result)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::parse_graph;

    #[test]
    fn triangle_is_found_exactly() {
        let g = parse_graph("3 3 undirected\n0 1 1\n1 2 1\n2 0 1\n").unwrap();
        let mut cfg = MwcConfig::new(5);
        cfg.trial_cap = Some(40);
        let r = approx_mwc(&g, 1.0, &cfg).unwrap();
        assert_eq!(r.w_tilde(), Some(3.0));
        assert_eq!(r.best.unwrap().validate(&g).unwrap().weight, 3);
    }

    #[test]
    fn acyclic_has_no_estimate() {
        let g = parse_graph("4 3 undirected\n0 1 2\n1 2 2\n1 3 2\n").unwrap();
        let mut cfg = MwcConfig::new(1);
        cfg.trial_cap = Some(3);
        let r = approx_mwc(&g, 2.0, &cfg).unwrap();
        assert!(r.best.is_none());
        assert_eq!(r.trials_run(), 6);
    }

    #[test]
    fn directed_is_rejected() {
        let g = parse_graph("3 3 directed\n0 1 1\n1 2 1\n2 0 1\n").unwrap();
        assert!(matches!(approx_mwc(&g, 1.0, &MwcConfig::new(0)), Err(MwcError::Directed)));
    }
}
