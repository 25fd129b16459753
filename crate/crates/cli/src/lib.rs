//! Experiment runner for `mcpc-core`: configuration, file formats, sweeps
//! and the rank, select, cluster report.

pub mod config;
pub mod error;
pub mod experiment;
pub mod io;
pub mod methods;

pub use config::{ExperimentConfig, Method, Source};
pub use error::{CliError, Result};
pub use experiment::{
    ingest_labeled_vectors, run_gamma_sweep, run_select_and_cluster, select_and_cluster, sweep, Instance,
    SelectOutcome, SweepOutcome,
};
pub use io::{Metric, ResultRow};
