//! Experiment driver for `vc-offload`: plans, batch execution, CSV output and summaries.
//!
//! # Output files
//!
//! `run_plan(..).write(dir)` produces
//!
//! * `results.csv`: one row per run, columns [`RESULT_COLUMNS`].
//! * `crrm_traces.csv`: `scenario, solver, gamma, seed, iteration, best_total`, one row per
//!   CRRM attempt after the first success.
//! * `scaling.csv`: per (scenario, solver, γ), the SP count, mean component count, mean
//!   wall time and its log10.
//!
//! Empty optional fields (no γ, no assignment) are written as empty cells. Every column but
//! `wall_time_s` (and the derived timing columns of `scaling.csv`) is a pure function of the
//! plan.

use std::path::PathBuf;

use thiserror::Error;

pub mod plan;
pub mod run;
pub mod summary;

pub use plan::{ladder_plan, comparison_plan, runtime_plan, ExperimentPlan, ScenarioEntry, ScenarioSource};
pub use run::{run_plan, PlanOutput, ResultRow, ScalingRow, TraceRow, RESULT_COLUMNS};
pub use summary::{summarize, Comparison, GroupStats, Summary};

#[derive(Debug, Error)]
pub enum HarnessError {
    #[error("I/O: {0}")]
    Io(#[from] std::io::Error),
    #[error("CSV: {0}")]
    Csv(#[from] csv::Error),
    #[error("cannot load instance {path}: {source}")]
    Instance {
        path: PathBuf,
        source: vc_offload::io::FormatError,
    },
    #[error("{path}: missing column `{column}`")]
    Schema { path: PathBuf, column: String },
    #[error("failed to start worker pool: {0}")]
    Pool(#[from] rayon::ThreadPoolBuildError),
}
