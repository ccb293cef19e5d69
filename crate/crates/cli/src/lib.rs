//! Experiment harness: random instances, configuration and CSV runs.

pub mod config;
pub mod experiment;
pub mod random;

pub use config::{Cli, ConfigError, EngineChoice, ExperimentConfig, GraphSource, Mode};
pub use experiment::{derive_seed, run_experiment, write_report, HarnessError, Report};
pub use random::{gen_random_graph, RandomGraphError};
