//! Experiment configuration, nested cross-validation and result files.

mod config;
mod cv;
mod report;

pub use config::{
    default_c_grid, default_gamma_grid, default_sigma_grid, default_tau_grid, parse_assignments, parse_config,
    parse_list, DataFormat, ExperimentConfig,
};
pub use cv::{
    fold_seed, grid_points, mean_std, prepare_outer_fold, run_nested_cv, select_point, CvResult, FoldRecord, GridPoint,
    MeanStd, PartialRun, Selection, Summary,
};
pub use report::{results_csv, results_jsonl, summary_table, write_results};
