//! Configuration parsing and experiment orchestration behind the `dcla`
//! binary.

pub mod config;
pub mod experiment;

pub use config::{ConfigError, ExperimentConfig, HistogramSpec, ModeSpec, RegularizerSpec, SCHEMA_VERSION};
pub use experiment::{run_ablation, run_experiment, AblationReport, HarnessError, Metrics, RunReport};
