//! Experiment drivers and their tabular output.

mod coding;
mod sweep;
mod table;
mod theory;

pub use coding::{run_coding_experiment, CodingConfig, CodingRow};
pub use sweep::{
    memory_count, run_network_sweep, run_single, sample_deployment_parts, trial_seed,
    DestinationRow, ExperimentConfig, SingleRun, SingleSummary, SweepAggregate, SweepResult,
    SweepRow, SOURCE,
};
pub use table::{format_float, json_rows, write_csv, write_json, Cell, OutputFormat, Table};
pub use theory::{emit_theory_curve, TheoryRow, BELOW_THRESHOLD_NOTE};

use thiserror::Error;

use crate::graph::GraphError;
use crate::memcoder::CoderError;
use crate::memnet::MemnetError;

#[derive(Debug, Error)]
pub enum HarnessError {
    #[error("invalid config: {0}")]
    ConfigInvalid(String),
    #[error(transparent)]
    Graph(#[from] GraphError),
    #[error(transparent)]
    Memnet(#[from] MemnetError),
    #[error(transparent)]
    Coder(#[from] CoderError),
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
}
