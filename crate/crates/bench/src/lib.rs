//! Experiment harness: configs, scenarios, runs and reports.

pub mod config;
pub mod error;
pub mod record;
pub mod report;
pub mod runner;
pub mod scenarios;

pub use config::{Budget, Config, ExperimentSpec};
pub use error::{BenchError, Result};
pub use record::{RunRecord, TaskRecord, Verdict};
pub use runner::{run_config, run_experiment};
