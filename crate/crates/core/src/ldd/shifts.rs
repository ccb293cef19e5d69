use rand::Rng;

use crate::graph::NodeId;

/// Fixed-point resolution of start times: ticks per unit of distance.
pub const TICKS_PER_UNIT: f64 = 4_294_967_296.0;

#[derive(Debug, thiserror::Error)]
pub enum ShiftError {
    #[error("rate must be positive, got {0}")]
    BadRate(f64),
    #[error("need at least two shifted values, got {0}")]
    TooFewValues(usize),
    #[error("need at least {min} trials, got {got}")]
    TooFewTrials { min: u64, got: u64 },
    #[error("expected {expected} offsets, got {got}")]
    OffsetCount { expected: usize, got: usize },
    #[error("k and d must be positive")]
    BadScale,
}

/// `-ln(u) / beta` for `u` in `(0, 1]`.
pub fn exponential_from_uniform(beta: f64, u: f64) -> Result<f64, ShiftError> {
    if !(beta > 0.0) {
        return Err(ShiftError::BadRate(beta));
    }
    Ok(-libm::log(u) / beta)
}

pub fn sample_exponential<R: Rng + ?Sized>(beta: f64, rng: &mut R) -> Result<f64, ShiftError> {
    // random::<f64>() lies in [0, 1), so 1 - it lies in (0, 1].
    exponential_from_uniform(beta, 1.0 - rng.random::<f64>())
}

/// Snaps a non-negative value to the tick grid.
pub fn to_ticks(x: f64) -> u128 {
    (x * TICKS_PER_UNIT) as u128
}

pub fn from_ticks(t: u128) -> f64 {
    t as f64 / TICKS_PER_UNIT
}

/// The random shifts of one decomposition.
///
/// Shifts are snapped down to the tick grid when drawn, so `delta` holds
/// exactly the values that drive the clustering.
#[derive(Clone, Debug)]
pub struct ShiftAssignment {
    pub sources: Vec<NodeId>,
    pub beta: f64,
    /// Start horizon `X`; source `u` starts at `X - delta_u`.
    pub horizon: f64,
    pub delta: Vec<f64>,
    pub delta_ticks: Vec<u128>,
    pub horizon_ticks: u128,
}

impl ShiftAssignment {
    /// Draws `delta_u ~ Exp(ln|S| / (k d))` for each source, with horizon `100 k d`.
    /// `ln|S|` is read as `ln max(|S|, 2)` so a single source is well defined.
    pub fn draw<R: Rng + ?Sized>(sources: &[NodeId], k: f64, d: f64, rng: &mut R) -> Result<Self, ShiftError> {
        if !(k > 0.0 && d > 0.0) {
            return Err(ShiftError::BadScale);
        }
        let beta = log_size(sources.len()) / (k * d);
        let horizon = 100.0 * k * d;
        let mut delta_ticks = Vec::with_capacity(sources.len());
        for _ in sources {
            delta_ticks.push(to_ticks(sample_exponential(beta, rng)?));
        }
        Ok(Self::from_ticks(sources.to_vec(), beta, horizon, delta_ticks))
    }

    pub fn from_ticks(sources: Vec<NodeId>, beta: f64, horizon: f64, delta_ticks: Vec<u128>) -> Self {
        ShiftAssignment {
            sources,
            beta,
            horizon,
            delta: delta_ticks.iter().map(|&t| from_ticks(t)).collect(),
            delta_ticks,
            horizon_ticks: to_ticks(horizon),
        }
    }

    /// True when some shift reaches the horizon, which aborts the decomposition.
    pub fn failed(&self) -> bool {
        self.delta_ticks.iter().any(|&t| t >= self.horizon_ticks)
    }

    pub fn max_delta(&self) -> f64 {
        self.delta.iter().copied().fold(0.0, f64::max)
    }

    /// Start time of each source in ticks; requires `!failed()`.
    pub fn start_ticks(&self) -> Vec<(NodeId, u128)> {
        self.sources
            .iter()
            .zip(&self.delta_ticks)
            .map(|(&u, &t)| (u, self.horizon_ticks - t))
            .collect()
    }

    pub fn delta_of(&self, u: NodeId) -> Option<f64> {
        self.sources.iter().position(|&s| s == u).map(|i| self.delta[i])
    }
}

/// `ln max(m, 2)`.
pub fn log_size(m: usize) -> f64 {
    libm::log(m.max(2) as f64)
}

/// Minimum number of trials accepted by [`max_secondmax_gap_stat`].
pub const GAP_STAT_MIN_TRIALS: u64 = 10_000;

/// Fraction of trials in which the largest of `Y_i = delta_i - offset_i`
/// exceeds the second largest by at least `c`, with `delta_i ~ Exp(beta)`.
pub fn max_secondmax_gap_stat<R: Rng + ?Sized>(
    m: usize,
    beta: f64,
    c: f64,
    offsets: Option<&[f64]>,
    trials: u64,
    rng: &mut R,
) -> Result<f64, ShiftError> {
    if m < 2 {
        return Err(ShiftError::TooFewValues(m));
    }
    if !(beta > 0.0) {
        return Err(ShiftError::BadRate(beta));
    }
    if trials < GAP_STAT_MIN_TRIALS {
        return Err(ShiftError::TooFewTrials {
            min: GAP_STAT_MIN_TRIALS,
            got: trials,
        });
    }
    if let Some(o) = offsets {
        if o.len() != m {
            return Err(ShiftError::OffsetCount { expected: m, got: o.len() });
        }
    }
    let mut hits = 0u64;
    for _ in 0..trials {
        let (mut first, mut second) = (f64::NEG_INFINITY, f64::NEG_INFINITY);
        for i in 0..m {
            let y = sample_exponential(beta, rng)? - offsets.map_or(0.0, |o| o[i]);
            if y > first {
                second = first;
                first = y;
            } else if y > second {
                second = y;
            }
        }
        if first - second >= c {
            hits += 1;
        }
    }
    Ok(hits as f64 / trials as f64)
}
