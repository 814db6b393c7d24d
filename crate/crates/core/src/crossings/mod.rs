//! Shell and cylinder traversals, straight runs, sparsity, and the
//! Monte-Carlo scans built on them.

mod cylinder;
mod montecarlo;
mod runs;
mod shell;
mod sparsity;
mod stats;

pub use cylinder::{check_well_separated, cylinder_traversal, Cylinder};
pub(crate) use montecarlo::run_trials;
pub use montecarlo::{corner_squares, estimate_lambda, estimate_rho, LambdaRow, LambdaScan, RhoEstimate, RhoRow, FAIL_BUDGET};
pub use runs::{detect_straight_runs, RunRecord, RunScan, ScaleLadder};
pub use shell::{
    kfold_center, min_kfold_scale, min_kfold_scale_with, shell_traversals, shell_traversals_per_curve, Counting,
    Shell,
};
pub use sparsity::{sparsity_check, SparsityVerdict};
pub use stats::{config_statistics, ConfigStatistics};
