//! Experiment runner for `expanse-core`: scenario files, runs, classifier
//! reports and parameter sweeps.

pub mod config;
pub mod output;
pub mod run;
pub mod sweep;

pub use config::{ConfigError, Scenario};
pub use run::{classify_scenario, run_batch, run_scenario, RunError, RunManifest, RunOptions};
pub use sweep::sweep_table;
