//! Experiment harness behind the `bench` binary: data loading, preset sweeps,
//! report emission and the self-check suite.

mod config;
mod report;
mod run;
mod series;
mod verify;

pub use config::{Experiment, ExperimentConfig, Problem};
pub use report::{emit_report, parse_report, render_csv, render_markdown, BenchRow, ReportFormat};
pub use run::{run_benchmark, BenchOutcome, InstanceFailure, InstanceResult, InstanceStats};
pub use series::load_series;
pub use verify::{run_verify, Check};
