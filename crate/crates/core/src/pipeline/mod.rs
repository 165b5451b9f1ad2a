//! End-to-end experiment driver and report writers.

mod config;
mod render;
mod report;
mod run;

pub use config::{ConfigError, ExperimentConfig, LayerSettings};
pub use render::{render_distance_matrix, GrayImage};
pub use report::{write_grid, write_seeds, write_summary, SUMMARY_HEADER};
pub use run::{
    cluster_stage, encode_stage, ingest_stage, report_stage, run_experiment, train_log_file, train_stage,
    PipelineError, RunArtifacts, Stage, DATASET_FILE, FAILED_FILE, FEATURES_FILE, GRID_FILE, MANIFEST_FILE,
    MATRIX_FILE, MODEL_FILE, NEWICK_FILE, RECONSTRUCTION_FILE, RUN_FILE, SEEDS_FILE, SUMMARY_FILE, TREE_FILE,
};
