//! Experiment driver behind the `ipg-bench` binary.

pub mod cli;
pub mod config;
pub mod experiments;
pub mod table;

pub use config::{Experiment, ExperimentConfig, SolverKind};
pub use experiments::{emit_curves, run_and_write, run_heron_sweep, run_isnr_grid, Outcome};
pub use table::ResultTable;
