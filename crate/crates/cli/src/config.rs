use std::path::PathBuf;

use clap::{Parser, ValueEnum};
use serde::Serialize;

use congest_mwc::hard::Variant;

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Mode {
    Approx,
    LddStats,
    HardGap,
    MovingCut,
    CostModel,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum EngineChoice {
    Condensed,
    Faithful,
}

/// Command-line flags, before validation.
#[derive(Clone, Debug, Parser)]
#[command(name = "congest-mwc", about = "Minimum weight cycle experiments in a simulated CONGEST network")]
pub struct Cli {
    #[arg(long, value_enum)]
    pub mode: Mode,
    /// Edge-list file.
    #[arg(long, group = "source")]
    pub graph: Option<PathBuf>,
    /// Random graph `n,m,W`.
    #[arg(long, group = "source")]
    pub random: Option<String>,
    /// Lower-bound instance `gamma,k,d,p,variant`.
    #[arg(long, group = "source")]
    pub hard: Option<String>,
    #[arg(long, default_value_t = 1.0)]
    pub kstar: f64,
    #[arg(long)]
    pub alpha: Option<f64>,
    #[arg(long)]
    pub eps: Option<f64>,
    /// Trial cap per regime (approx), decompositions (ldd-stats) or instances (hard-gap).
    #[arg(long)]
    pub trials: Option<u64>,
    /// Independent runs, one CSV row each.
    #[arg(long, default_value_t = 1)]
    pub runs: u64,
    #[arg(long)]
    pub seed: u64,
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Decomposition parameter for ldd-stats.
    #[arg(long, default_value_t = 1.0)]
    pub ldd_k: f64,
    /// Decomposition distance for ldd-stats; defaults to half the minimum cycle weight.
    #[arg(long)]
    pub ldd_d: Option<f64>,
    /// Node count for cost-model.
    #[arg(long)]
    pub n: Option<usize>,
    /// Hop diameter for cost-model.
    #[arg(long)]
    pub diameter: Option<usize>,
    /// Comma-separated trade-off values for cost-model.
    #[arg(long, value_delimiter = ',')]
    pub q: Vec<f64>,
    #[arg(long, value_enum, default_value_t = EngineChoice::Condensed)]
    pub engine: EngineChoice,
    /// Directory for edge lists and JSON sidecars of generated lower-bound instances.
    #[arg(long)]
    pub export: Option<PathBuf>,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum GraphSource {
    File { path: PathBuf },
    Random { n: usize, m: usize, max_weight: u64 },
    Hard { gamma: usize, k: usize, d: u64, p: u32, variant: Variant },
}

/// A validated experiment description. Every field is written to the
/// metadata header of the output.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ExperimentConfig {
    pub mode: Mode,
    pub source: Option<GraphSource>,
    pub k_star: f64,
    pub alpha: Option<f64>,
    pub eps: Option<f64>,
    pub trials: Option<u64>,
    pub runs: u64,
    pub seed: u64,
    pub out: Option<PathBuf>,
    pub ldd_k: f64,
    pub ldd_d: Option<f64>,
    pub cost_n: Option<usize>,
    pub cost_diameter: Option<usize>,
    pub q: Vec<f64>,
    pub engine: EngineChoice,
    pub export: Option<PathBuf>,
}

#[derive(Debug, thiserror::Error)]
#[error("invalid {field}: {message}")]
pub struct ConfigError {
    pub field: &'static str,
    pub message: String,
}

pub(crate) fn config_err(field: &'static str, message: impl Into<String>) -> ConfigError {
    ConfigError {
        field,
        message: message.into(),
    }
}

fn parse_list<T: std::str::FromStr>(field: &'static str, s: &str, len: usize) -> Result<Vec<T>, ConfigError> {
    let parts: Vec<&str> = s.split(',').map(str::trim).collect();
    if parts.len() != len {
        return Err(config_err(field, format!("expected {len} comma-separated values, got {s:?}")));
    }
    parts
        .iter()
        .map(|p| p.parse().map_err(|_| config_err(field, format!("cannot parse {p:?}"))))
        .collect()
}

fn parse_random(s: &str) -> Result<GraphSource, ConfigError> {
    let v: Vec<u64> = parse_list("random", s, 3)?;
    let (n, m, w) = (v[0] as usize, v[1] as usize, v[2]);
    if n == 0 {
        return Err(config_err("random", "n must be positive"));
    }
    if m > n * (n - 1) / 2 {
        return Err(config_err("random", format!("{m} edges do not fit {n} nodes")));
    }
    if w == 0 || w >= 1 << 63 {
        return Err(config_err("random", "W must be in [1, 2^63)"));
    }
    Ok(GraphSource::Random { n, m, max_weight: w })
}

fn parse_hard(s: &str) -> Result<GraphSource, ConfigError> {
    let parts: Vec<&str> = s.split(',').map(str::trim).collect();
    if parts.len() != 5 {
        return Err(config_err("hard", format!("expected gamma,k,d,p,variant, got {s:?}")));
    }
    let nums: Vec<u64> = parse_list("hard", &parts[..4].join(","), 4)?;
    let variant: Variant = parts[4].parse().map_err(|e: String| config_err("hard", e))?;
    let (gamma, k, d, p) = (nums[0] as usize, nums[1] as usize, nums[2], nums[3] as u32);
    if gamma == 0 || k == 0 || d < 2 || p == 0 {
        return Err(config_err("hard", "need gamma >= 1, k >= 1, d >= 2, p >= 1"));
    }
    Ok(GraphSource::Hard { gamma, k, d, p, variant })
}

impl Cli {
    pub fn validate(&self) -> Result<ExperimentConfig, ConfigError> {
        let source = match (&self.graph, &self.random, &self.hard) {
            (Some(p), None, None) => Some(GraphSource::File { path: p.clone() }),
            (None, Some(r), None) => Some(parse_random(r)?),
            (None, None, Some(h)) => Some(parse_hard(h)?),
            (None, None, None) => None,
            _ => return Err(config_err("graph", "give at most one of --graph, --random, --hard")),
        };
        if !(self.kstar >= 1.0 && self.kstar.is_finite()) {
            return Err(config_err("kstar", "must be a finite number >= 1"));
        }
        if self.alpha.is_some_and(|a| !(a >= 1.0 && a.is_finite())) {
            return Err(config_err("alpha", "must be a finite number >= 1"));
        }
        if self.eps.is_some_and(|e| !(e > 0.0 && e < 1.0)) {
            return Err(config_err("eps", "must lie in (0, 1)"));
        }
        if self.trials == Some(0) {
            return Err(config_err("trials", "must be positive"));
        }
        if self.runs == 0 {
            return Err(config_err("runs", "must be positive"));
        }
        if !(self.ldd_k > 0.0 && self.ldd_k.is_finite()) {
            return Err(config_err("ldd_k", "must be positive"));
        }
        if self.ldd_d.is_some_and(|d| !(d > 0.0 && d.is_finite())) {
            return Err(config_err("ldd_d", "must be positive"));
        }
        match self.mode {
            Mode::Approx | Mode::LddStats if source.is_none() => {
                return Err(config_err("graph", "this mode needs --graph, --random or --hard"));
            }
            Mode::HardGap | Mode::MovingCut if !matches!(source, Some(GraphSource::Hard { .. })) => {
                return Err(config_err("hard", "this mode needs --hard"));
            }
            Mode::Approx
                if matches!(
                    source,
                    Some(GraphSource::Hard {
                        variant: Variant::DirectedUnweighted,
                        ..
                    })
                ) =>
            {
                return Err(config_err("hard", "the approximation needs the undirected weighted variant"));
            }
            Mode::CostModel => {
                if self.n.is_none_or(|n| n == 0) {
                    return Err(config_err("n", "cost-model needs --n >= 1"));
                }
                if self.diameter.is_none() {
                    return Err(config_err("diameter", "cost-model needs --diameter"));
                }
                if self.q.is_empty() {
                    return Err(config_err("q", "cost-model needs at least one --q value"));
                }
            }
            _ => {}
        }
        Ok(ExperimentConfig {
            mode: self.mode,
            source,
            k_star: self.kstar,
            alpha: self.alpha,
            eps: self.eps,
            trials: self.trials,
            runs: self.runs,
            seed: self.seed,
            out: self.out.clone(),
            ldd_k: self.ldd_k,
            ldd_d: self.ldd_d,
            cost_n: self.n,
            cost_diameter: self.diameter,
            q: self.q.clone(),
            engine: self.engine,
            export: self.export.clone(),
        })
    }
}
