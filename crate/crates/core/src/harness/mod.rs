//! Experiment configuration, orchestration and report emission.

pub mod config;
pub mod experiment;
pub mod report;

pub use config::{load_config, ExperimentConfig, InstanceSpec, Kind};
pub use experiment::{packing_probe, run_experiment, RecordSet};
pub use report::emit_report;
