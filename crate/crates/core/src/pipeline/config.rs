use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::autoencoder::{LayerConfig, TransferKind};
use crate::clustering::{MethodKind, MetricKind};

#[derive(Debug, thiserror::Error)]
pub enum ConfigError {
    #[error("cannot read config {path}: {source}")]
    Read {
        path: String,
        #[source]
        source: std::io::Error,
    },
    #[error("invalid config: {0}")]
    Json(#[from] serde_json::Error),
    #[error("invalid config: {0}")]
    Invalid(String),
}

/// Per-layer hyperparameters as written in a config file; seeds come from the experiment.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct LayerSettings {
    pub hidden_units: usize,
    pub beta: f64,
    pub lambda: f64,
    pub rho: f64,
    pub max_epochs: usize,
    pub learning_rate: f64,
    pub momentum: f64,
    pub encoder_transfer: TransferKind,
    pub decoder_transfer: TransferKind,
}

impl LayerSettings {
    pub fn new(hidden_units: usize) -> Self {
        Self { hidden_units, ..Self::default() }
    }

    pub fn to_layer_config(&self, seed: u64) -> LayerConfig {
        LayerConfig {
            hidden_units: self.hidden_units,
            beta: self.beta,
            lambda: self.lambda,
            rho: self.rho,
            max_epochs: self.max_epochs,
            learning_rate: self.learning_rate,
            momentum: self.momentum,
            seed,
            encoder_transfer: self.encoder_transfer,
            decoder_transfer: self.decoder_transfer,
        }
    }
}

impl Default for LayerSettings {
    fn default() -> Self {
        let c = LayerConfig::default();
        Self {
            hidden_units: c.hidden_units,
            beta: c.beta,
            lambda: c.lambda,
            rho: c.rho,
            max_epochs: c.max_epochs,
            learning_rate: c.learning_rate,
            momentum: c.momentum,
            encoder_transfer: c.encoder_transfer,
            decoder_transfer: c.decoder_transfer,
        }
    }
}

fn default_layers() -> Vec<LayerSettings> {
    [625, 400, 256].into_iter().map(LayerSettings::new).collect()
}

fn default_threshold() -> f64 {
    0.5
}

fn default_methods() -> Vec<MethodKind> {
    MethodKind::ALL.to_vec()
}

fn default_metrics() -> Vec<MetricKind> {
    MetricKind::ALL.to_vec()
}

fn default_clip() -> [f64; 2] {
    [3.0, 97.0]
}

/// One experiment: a folder of profiles, the network to train and the clustering grid.
///
/// Only `name`, `input_dir` and `output_dir` are required; unknown keys are rejected.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub name: String,
    pub input_dir: PathBuf,
    pub output_dir: PathBuf,
    #[serde(default = "default_threshold")]
    pub threshold: f64,
    /// Snap resampled pixels back to {0, 1}.
    #[serde(default)]
    pub rebinarize: bool,
    #[serde(default = "default_layers")]
    pub layers: Vec<LayerSettings>,
    #[serde(default = "default_methods")]
    pub methods: Vec<MethodKind>,
    #[serde(default = "default_metrics")]
    pub metrics: Vec<MetricKind>,
    /// Skip centroid/median/ward under non-Euclidean metrics instead of flagging them.
    #[serde(default)]
    pub strict_geometry: bool,
    /// Lower and upper percentiles for the distance-matrix image.
    #[serde(default = "default_clip")]
    pub clip_percentiles: [f64; 2],
    /// Layer `l` (from 0) is initialized with `seed + l`.
    #[serde(default)]
    pub seed: u64,
}

impl ExperimentConfig {
    pub fn new(name: impl Into<String>, input_dir: impl Into<PathBuf>, output_dir: impl Into<PathBuf>) -> Self {
        Self {
            name: name.into(),
            input_dir: input_dir.into(),
            output_dir: output_dir.into(),
            threshold: default_threshold(),
            rebinarize: false,
            layers: default_layers(),
            methods: default_methods(),
            metrics: default_metrics(),
            strict_geometry: false,
            clip_percentiles: default_clip(),
            seed: 0,
        }
    }

    pub fn from_json(text: &str) -> Result<Self, ConfigError> {
        let cfg: Self = serde_json::from_str(text)?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn load(path: &Path) -> Result<Self, ConfigError> {
        let text = std::fs::read_to_string(path)
            .map_err(|source| ConfigError::Read { path: path.display().to_string(), source })?;
        Self::from_json(&text)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("config is always serializable")
    }

    pub fn layer_configs(&self) -> Vec<LayerConfig> {
        self.layers
            .iter()
            .enumerate()
            .map(|(i, l)| l.to_layer_config(self.seed.wrapping_add(i as u64)))
            .collect()
    }

    pub fn validate(&self) -> Result<(), ConfigError> {
        let bad = |m: String| Err(ConfigError::Invalid(m));
        if self.name.is_empty() {
            return bad("name must not be empty".into());
        }
        if !(self.threshold > 0.0 && self.threshold < 1.0) {
            return bad(format!("threshold {} outside (0, 1)", self.threshold));
        }
        if self.layers.is_empty() {
            return bad("at least one layer is required".into());
        }
        for pair in self.layers.windows(2) {
            if pair[1].hidden_units >= pair[0].hidden_units {
                return bad(format!(
                    "hidden units must strictly decrease, got {} then {}",
                    pair[0].hidden_units, pair[1].hidden_units
                ));
            }
        }
        for (i, c) in self.layer_configs().iter().enumerate() {
            c.validate().map_err(|e| ConfigError::Invalid(format!("layer {}: {e}", i + 1)))?;
        }
        if self.methods.is_empty() || self.metrics.is_empty() {
            return bad("methods and metrics must not be empty".into());
        }
        for m in &self.metrics {
            m.validate().map_err(|e| ConfigError::Invalid(e.to_string()))?;
        }
        let [lo, hi] = self.clip_percentiles;
        if !(0.0 <= lo && lo <= hi && hi <= 100.0) {
            return bad(format!("clip percentiles {lo}/{hi} must satisfy 0 <= lo <= hi <= 100"));
        }
        Ok(())
    }
}
