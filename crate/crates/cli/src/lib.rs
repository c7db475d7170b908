//! Experiment driver for the `qsvm` command line tool.

pub mod config;
pub mod experiment;
pub mod report;
pub mod stats;

pub use config::{ExperimentConfig, ExperimentKind};
pub use experiment::{run, Record, RunSummary};
