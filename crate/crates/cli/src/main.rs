use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use shapeclust::autoencoder::StackedModel;
use shapeclust::clustering::{ClusterRun, MethodKind, MetricKind, SelectOptions};
use shapeclust::ingest::{read_manifest, FileStatus, LoadOptions};
use shapeclust::matrix_io::{Matrix, DATASET_TAG, FEATURES_TAG};
use shapeclust::pipeline::{
    cluster_stage, encode_stage, ingest_stage, report_stage, run_experiment, train_stage, ConfigError, PipelineError,
    Stage, DATASET_FILE, FEATURES_FILE, MANIFEST_FILE, MODEL_FILE, RUN_FILE,
};
use shapeclust::ExperimentConfig;

/// Cluster binary shape profiles with a stacked sparse autoencoder and hierarchical linkage.
#[derive(Parser)]
#[command(name = "shapeclust", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Normalize a folder of images into a manifest and a dataset matrix.
    Ingest(IngestArgs),
    /// Train the autoencoder stack on a dataset matrix.
    Train(TrainArgs),
    /// Encode a dataset matrix into deepest-layer signatures.
    Encode(EncodeArgs),
    /// Search the method x metric grid and build the chosen tree.
    Cluster(ClusterArgs),
    /// Write Newick, seeds, distance-matrix image and summary from a cluster run.
    Report(ReportArgs),
    /// Run every stage from a config file.
    Run(RunArgs),
}

#[derive(Args)]
struct IngestArgs {
    #[arg(long)]
    input: PathBuf,
    #[arg(long)]
    out: PathBuf,
    #[arg(long, default_value = "dataset")]
    name: String,
    #[arg(long, default_value_t = 0.5)]
    threshold: f64,
    #[arg(long)]
    rebinarize: bool,
}

#[derive(Args)]
struct TrainArgs {
    /// Experiment config; only the layers and seed are used.
    #[arg(long)]
    config: PathBuf,
    #[arg(long)]
    dataset: PathBuf,
    #[arg(long)]
    out: PathBuf,
    #[arg(long)]
    seed: Option<u64>,
}

#[derive(Args)]
struct EncodeArgs {
    #[arg(long)]
    model: PathBuf,
    #[arg(long)]
    dataset: PathBuf,
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args)]
struct ClusterArgs {
    #[arg(long)]
    features: PathBuf,
    #[arg(long)]
    out: PathBuf,
    #[arg(long, default_value = "dataset")]
    name: String,
    /// Comma-separated linkage methods; all seven by default.
    #[arg(long, value_delimiter = ',')]
    methods: Vec<String>,
    /// Comma-separated metrics, e.g. `cosine,minkowski:3`; all seven by default.
    #[arg(long, value_delimiter = ',')]
    metrics: Vec<String>,
    /// Skip centroid, median and ward under non-Euclidean metrics.
    #[arg(long)]
    strict: bool,
}

#[derive(Args)]
struct ReportArgs {
    #[arg(long)]
    run: PathBuf,
    /// Manifest whose `ok` rows label the leaves.
    #[arg(long)]
    manifest: PathBuf,
    #[arg(long)]
    out: PathBuf,
    #[arg(long, value_delimiter = ',', num_args = 2, default_values_t = [3.0, 97.0])]
    clip: Vec<f64>,
}

#[derive(Args)]
struct RunArgs {
    #[arg(long)]
    config: PathBuf,
    #[arg(long)]
    seed: Option<u64>,
}

enum Failure {
    Config(String),
    Stage(PipelineError),
}

impl From<ConfigError> for Failure {
    fn from(e: ConfigError) -> Self {
        Failure::Config(e.to_string())
    }
}

impl From<PipelineError> for Failure {
    fn from(e: PipelineError) -> Self {
        Failure::Stage(e)
    }
}

fn at<T, E: Into<Box<dyn std::error::Error + Send + Sync>>>(stage: Stage, r: Result<T, E>) -> Result<T, Failure> {
    r.map_err(|e| Failure::Stage(PipelineError::new(stage, e)))
}

fn parse_list<T: std::str::FromStr>(names: &[String], all: &[T]) -> Result<Vec<T>, Failure>
where
    T: Clone,
    T::Err: std::fmt::Display,
{
    if names.is_empty() {
        return Ok(all.to_vec());
    }
    names.iter().map(|n| n.trim().parse().map_err(|e: T::Err| Failure::Config(e.to_string()))).collect()
}

fn create_out(stage: Stage, dir: &Path) -> Result<(), Failure> {
    at(stage, std::fs::create_dir_all(dir))
}

fn ingest(a: IngestArgs) -> Result<(), Failure> {
    if !(a.threshold > 0.0 && a.threshold < 1.0) {
        return Err(Failure::Config(format!("threshold {} outside (0, 1)", a.threshold)));
    }
    create_out(Stage::Ingest, &a.out)?;
    let opts = LoadOptions { threshold: a.threshold, rebinarize: a.rebinarize };
    let (loaded, _) = ingest_stage(&a.input, &a.name, opts, &a.out)?;
    println!(
        "ingested {} profiles ({} skipped) into {}",
        loaded.dataset.len(),
        loaded.skipped(),
        a.out.join(DATASET_FILE).display()
    );
    Ok(())
}

fn train(a: TrainArgs) -> Result<(), Failure> {
    let mut cfg = ExperimentConfig::load(&a.config)?;
    if let Some(seed) = a.seed {
        cfg.seed = seed;
    }
    let data = at(Stage::Train, Matrix::load(&a.dataset, DATASET_TAG))?;
    create_out(Stage::Train, &a.out)?;
    let (_, stats) = train_stage(&data, &cfg, &a.out)?;
    println!(
        "trained {} layers; median reconstruction error {:.6}; model in {}",
        cfg.layers.len(),
        stats.median,
        a.out.join(MODEL_FILE).display()
    );
    Ok(())
}

fn encode(a: EncodeArgs) -> Result<(), Failure> {
    let model = at(Stage::Encode, StackedModel::load(&a.model))?;
    let data = at(Stage::Encode, Matrix::load(&a.dataset, DATASET_TAG))?;
    create_out(Stage::Encode, &a.out)?;
    let f = encode_stage(&model, &data, &a.out)?;
    println!("encoded {} x {} signatures into {}", f.rows, f.cols, a.out.join(FEATURES_FILE).display());
    Ok(())
}

fn cluster(a: ClusterArgs) -> Result<(), Failure> {
    let methods = parse_list(&a.methods, &MethodKind::ALL)?;
    let metrics = parse_list(&a.metrics, &MetricKind::ALL)?;
    let features = at(Stage::Cluster, Matrix::load(&a.features, FEATURES_TAG))?;
    create_out(Stage::Cluster, &a.out)?;
    let opts = SelectOptions { strict_geometry: a.strict };
    let run = cluster_stage(&features, &a.name, &methods, &metrics, opts, &a.out)?;
    println!(
        "chose {}/{} with cophenetic correlation {:.4}; run in {}",
        run.chosen_method,
        run.chosen_metric,
        run.chosen_cophenet,
        a.out.join(RUN_FILE).display()
    );
    Ok(())
}

fn report(a: ReportArgs) -> Result<(), Failure> {
    let (lo, hi) = (a.clip[0], a.clip[1]);
    if !(0.0 <= lo && lo <= hi && hi <= 100.0) {
        return Err(Failure::Config(format!("clip percentiles {lo}/{hi} must satisfy 0 <= lo <= hi <= 100")));
    }
    let text = at(Stage::Report, std::fs::read_to_string(&a.run))?;
    let run: ClusterRun = at(Stage::Report, serde_json::from_str(&text))?;
    let labels: Vec<String> = at(Stage::Report, read_manifest(&a.manifest))?
        .into_iter()
        .filter(|e| e.status == FileStatus::Ok)
        .map(|e| e.path)
        .collect();
    if labels.len() != run.n() {
        let msg = format!("{} has {} usable rows but the run has {} leaves", MANIFEST_FILE, labels.len(), run.n());
        return Err(Failure::Stage(PipelineError::new(Stage::Report, msg)));
    }
    create_out(Stage::Report, &a.out)?;
    report_stage(&run, &labels, [lo, hi], &a.out)?;
    println!("wrote report for {} profiles into {}", run.n(), a.out.display());
    Ok(())
}

fn run(a: RunArgs) -> Result<(), Failure> {
    let mut cfg = ExperimentConfig::load(&a.config)?;
    if let Some(seed) = a.seed {
        cfg.seed = seed;
    }
    let artifacts = run_experiment(&cfg)?;
    println!("{} finished; summary in {}", cfg.name, artifacts.summary.display());
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Ingest(a) => ingest(a),
        Command::Train(a) => train(a),
        Command::Encode(a) => encode(a),
        Command::Cluster(a) => cluster(a),
        Command::Report(a) => report(a),
        Command::Run(a) => run(a),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Stage(e)) => {
            eprintln!("error: {e}");
            ExitCode::from(1)
        }
        Err(Failure::Config(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
    }
}
