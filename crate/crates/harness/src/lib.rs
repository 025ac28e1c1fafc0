//! Benchmark harness: random instance generation, the BF / SA / QAOA / QAOAH
//! pipelines, per-run metrics, CSV and JSON-lines export, and summary plots.

pub mod config;
pub mod error;
pub mod experiment;
pub mod export;
pub mod generator;
pub mod plot;

pub use config::{ExperimentConfig, SolverKind};
pub use error::{HarnessError, Result};
pub use experiment::{run_experiment, run_instance, RunRecord};
pub use export::{export, ExportFormat};
pub use generator::generate_instance;
pub use plot::{plot_summary, summarize, SummaryRow};
