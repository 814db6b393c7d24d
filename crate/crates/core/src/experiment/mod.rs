//! Experiment configs, the orchestrator that runs them, and result tables.

mod config;
mod run;
mod table;

pub use config::{ExperimentConfig, ExperimentKind};
pub use run::{run_experiment, ResultRecord};
pub use table::{emit_table, Table, TableFormat};
