use std::fmt;
use std::fs;
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};

use ndarray::{Array2, ArrayView2};

use super::config::ExperimentConfig;
use super::render::render_distance_matrix;
use super::report::{write_grid, write_seeds, write_summary};
use crate::autoencoder::{reconstruction_stats, train_stack, ReconstructionStats, StackedModel};
use crate::clustering::{select_best, to_newick, write_merge_list, ClusterRun, SelectOptions};
use crate::ingest::{load_dataset, write_manifest, LoadOptions, LoadedDataset};
use crate::matrix_io::{Matrix, DATASET_TAG, FEATURES_TAG};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Stage {
    Ingest,
    Train,
    Encode,
    Cluster,
    Report,
}

impl fmt::Display for Stage {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Stage::Ingest => "ingest",
            Stage::Train => "train",
            Stage::Encode => "encode",
            Stage::Cluster => "cluster",
            Stage::Report => "report",
        })
    }
}

#[derive(Debug, thiserror::Error)]
#[error("{stage} stage failed: {source}")]
pub struct PipelineError {
    pub stage: Stage,
    #[source]
    pub source: Box<dyn std::error::Error + Send + Sync>,
}

impl PipelineError {
    pub fn new(stage: Stage, source: impl Into<Box<dyn std::error::Error + Send + Sync>>) -> Self {
        Self { stage, source: source.into() }
    }
}

trait AtStage<T> {
    fn at(self, stage: Stage) -> Result<T, PipelineError>;
}

impl<T, E: Into<Box<dyn std::error::Error + Send + Sync>>> AtStage<T> for Result<T, E> {
    fn at(self, stage: Stage) -> Result<T, PipelineError> {
        self.map_err(|e| PipelineError::new(stage, e))
    }
}

pub const MANIFEST_FILE: &str = "manifest.csv";
pub const DATASET_FILE: &str = "dataset.bin";
pub const MODEL_FILE: &str = "model.ssae";
pub const FEATURES_FILE: &str = "features.bin";
pub const RECONSTRUCTION_FILE: &str = "reconstruction.csv";
pub const GRID_FILE: &str = "grid.csv";
pub const TREE_FILE: &str = "tree.csv";
pub const NEWICK_FILE: &str = "tree.nwk";
pub const RUN_FILE: &str = "run.json";
pub const SEEDS_FILE: &str = "seeds.csv";
pub const MATRIX_FILE: &str = "matrix.pgm";
pub const SUMMARY_FILE: &str = "summary.csv";
pub const FAILED_FILE: &str = "FAILED";

pub fn train_log_file(layer: usize) -> String {
    format!("train_layer{layer}.csv")
}

/// Files written by a complete run.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RunArtifacts {
    pub manifest: PathBuf,
    pub dataset: PathBuf,
    pub model: PathBuf,
    pub train_logs: Vec<PathBuf>,
    pub reconstruction: PathBuf,
    pub features: PathBuf,
    pub grid: PathBuf,
    pub tree: PathBuf,
    pub newick: PathBuf,
    pub run: PathBuf,
    pub seeds: PathBuf,
    pub matrix_image: PathBuf,
    pub summary: PathBuf,
}

impl RunArtifacts {
    pub fn in_dir(dir: &Path, layers: usize) -> Self {
        Self {
            manifest: dir.join(MANIFEST_FILE),
            dataset: dir.join(DATASET_FILE),
            model: dir.join(MODEL_FILE),
            train_logs: (1..=layers).map(|l| dir.join(train_log_file(l))).collect(),
            reconstruction: dir.join(RECONSTRUCTION_FILE),
            features: dir.join(FEATURES_FILE),
            grid: dir.join(GRID_FILE),
            tree: dir.join(TREE_FILE),
            newick: dir.join(NEWICK_FILE),
            run: dir.join(RUN_FILE),
            seeds: dir.join(SEEDS_FILE),
            matrix_image: dir.join(MATRIX_FILE),
            summary: dir.join(SUMMARY_FILE),
        }
    }

    pub fn all(&self) -> Vec<&Path> {
        let mut v: Vec<&Path> = vec![&self.manifest, &self.dataset, &self.model, &self.reconstruction, &self.features];
        v.extend(self.train_logs.iter().map(PathBuf::as_path));
        v.extend([
            self.grid.as_path(),
            &self.tree,
            &self.newick,
            &self.run,
            &self.seeds,
            &self.matrix_image,
            &self.summary,
        ]);
        v
    }
}

fn write_file(path: &Path, f: impl FnOnce(&mut BufWriter<fs::File>) -> Result<(), Box<dyn std::error::Error + Send + Sync>>) -> Result<(), Box<dyn std::error::Error + Send + Sync>> {
    let mut w = BufWriter::new(fs::File::create(path)?);
    f(&mut w)?;
    w.flush()?;
    Ok(())
}

/// Loads and normalizes the profiles; writes the manifest and the dataset matrix.
pub fn ingest_stage(
    input_dir: &Path,
    name: &str,
    opts: LoadOptions,
    out_dir: &Path,
) -> Result<(LoadedDataset, Matrix), PipelineError> {
    if !input_dir.is_dir() {
        return Err(PipelineError::new(Stage::Ingest, format!("input directory {} does not exist", input_dir.display())));
    }
    let loaded = load_dataset(input_dir, name, opts).at(Stage::Ingest)?;
    write_manifest(&out_dir.join(MANIFEST_FILE), &loaded.manifest).at(Stage::Ingest)?;
    let ds = &loaded.dataset;
    let matrix = Matrix::new(ds.len(), ds.dim(), ds.to_rows()).at(Stage::Ingest)?;
    matrix.save(&out_dir.join(DATASET_FILE), DATASET_TAG).at(Stage::Ingest)?;
    Ok((loaded, matrix))
}

fn view(m: &Matrix) -> ArrayView2<'_, f64> {
    ArrayView2::from_shape((m.rows, m.cols), &m.data).expect("matrix shape is consistent")
}

/// Trains the stack; writes the model, one loss log per layer and reconstruction errors.
pub fn train_stage(
    data: &Matrix,
    cfg: &ExperimentConfig,
    out_dir: &Path,
) -> Result<(StackedModel, ReconstructionStats), PipelineError> {
    let (model, reports) = train_stack(view(data), &cfg.layer_configs()).at(Stage::Train)?;
    model.save(&out_dir.join(MODEL_FILE)).at(Stage::Train)?;
    for (i, r) in reports.iter().enumerate() {
        r.save_csv(&out_dir.join(train_log_file(i + 1))).at(Stage::Train)?;
    }
    let stats = reconstruction_stats(&model, view(data)).at(Stage::Train)?;
    write_file(&out_dir.join(RECONSTRUCTION_FILE), |w| write_reconstruction(w, &stats)).at(Stage::Train)?;
    Ok((model, stats))
}

fn write_reconstruction(w: &mut impl Write, s: &ReconstructionStats) -> Result<(), Box<dyn std::error::Error + Send + Sync>> {
    writeln!(w, "statistic,value")?;
    for (k, v) in [
        ("min", s.min),
        ("q1", s.q1),
        ("median", s.median),
        ("q3", s.q3),
        ("max", s.max),
        ("mean", s.mean),
        ("skewness", s.skewness),
    ] {
        writeln!(w, "{k},{v}")?;
    }
    for (i, e) in s.per_sample.iter().enumerate() {
        writeln!(w, "sample_{i},{e}")?;
    }
    Ok(())
}

/// Deepest-layer signatures of every profile.
pub fn encode_stage(model: &StackedModel, data: &Matrix, out_dir: &Path) -> Result<Matrix, PipelineError> {
    let codes: Array2<f64> = model.encode_batch(view(data)).at(Stage::Encode)?;
    let (rows, cols) = codes.dim();
    let features = Matrix::new(rows, cols, codes.into_iter().collect()).at(Stage::Encode)?;
    features.save(&out_dir.join(FEATURES_FILE), FEATURES_TAG).at(Stage::Encode)?;
    Ok(features)
}

/// Runs the method x metric search; writes the grid, the merge list and the serialized run.
pub fn cluster_stage(
    features: &Matrix,
    name: &str,
    methods: &[crate::clustering::MethodKind],
    metrics: &[crate::clustering::MetricKind],
    opts: SelectOptions,
    out_dir: &Path,
) -> Result<ClusterRun, PipelineError> {
    let mut run = select_best(view(features), methods, metrics, opts).at(Stage::Cluster)?;
    run.dataset_name = name.to_string();
    write_file(&out_dir.join(GRID_FILE), |w| Ok(write_grid(w, &run)?)).at(Stage::Cluster)?;
    fs::write(out_dir.join(TREE_FILE), write_merge_list(&run.tree)).at(Stage::Cluster)?;
    write_file(&out_dir.join(RUN_FILE), |w| Ok(serde_json::to_writer(w, &run)?)).at(Stage::Cluster)?;
    Ok(run)
}

/// Writes the Newick tree, seeds, distance-matrix image and summary row.
pub fn report_stage(run: &ClusterRun, labels: &[String], clip: [f64; 2], out_dir: &Path) -> Result<(), PipelineError> {
    let newick = to_newick(&run.tree, labels).at(Stage::Report)?;
    fs::write(out_dir.join(NEWICK_FILE), newick + "\n").at(Stage::Report)?;
    write_file(&out_dir.join(SEEDS_FILE), |w| Ok(write_seeds(w, run, labels)?)).at(Stage::Report)?;
    render_distance_matrix(&run.distances, &run.leaf_order, clip[0], clip[1])
        .save_pgm(&out_dir.join(MATRIX_FILE))
        .at(Stage::Report)?;
    write_file(&out_dir.join(SUMMARY_FILE), |w| Ok(write_summary(w, run)?)).at(Stage::Report)?;
    Ok(())
}

/// Runs ingest, training, encoding, clustering and reporting for one experiment.
///
/// On failure a `FAILED` file naming the stage and cause is left in the
/// output directory next to whatever was already written.
pub fn run_experiment(cfg: &ExperimentConfig) -> Result<RunArtifacts, PipelineError> {
    let out = &cfg.output_dir;
    fs::create_dir_all(out).at(Stage::Ingest)?;
    let failed = out.join(FAILED_FILE);
    if failed.exists() {
        fs::remove_file(&failed).at(Stage::Ingest)?;
    }
    let result = run_stages(cfg);
    if let Err(e) = &result {
        // best effort: the original error matters more than a failed marker write
        let _ = fs::write(&failed, format!("stage: {}\ncause: {}\n", e.stage, e.source));
    }
    result
}

fn run_stages(cfg: &ExperimentConfig) -> Result<RunArtifacts, PipelineError> {
    let out = &cfg.output_dir;
    let opts = LoadOptions { threshold: cfg.threshold, rebinarize: cfg.rebinarize };
    let (loaded, data) = ingest_stage(&cfg.input_dir, &cfg.name, opts, out)?;
    let (model, _) = train_stage(&data, cfg, out)?;
    let features = encode_stage(&model, &data, out)?;
    let select = SelectOptions { strict_geometry: cfg.strict_geometry };
    let run = cluster_stage(&features, &cfg.name, &cfg.methods, &cfg.metrics, select, out)?;
    report_stage(&run, &loaded.dataset.labels(), cfg.clip_percentiles, out)?;
    Ok(RunArtifacts::in_dir(out, cfg.layers.len()))
}
