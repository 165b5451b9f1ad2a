use std::io::Write;
use std::path::Path;

use ndarray::{Array1, Array2, ArrayView2};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::gradient::{layer_gradients, layer_loss, Gradients};
use super::layer::SaeLayer;
use super::model::StackedModel;
use super::transfer::TransferKind;
use super::AutoencoderError;

/// Hyperparameters for training one layer.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct LayerConfig {
    pub hidden_units: usize,
    /// Weight of the KL sparsity term.
    pub beta: f64,
    /// Weight of the L2 weight-decay term.
    pub lambda: f64,
    /// Target mean activation of each hidden unit.
    pub rho: f64,
    pub max_epochs: usize,
    pub learning_rate: f64,
    pub momentum: f64,
    pub seed: u64,
    pub encoder_transfer: TransferKind,
    pub decoder_transfer: TransferKind,
}

impl LayerConfig {
    pub fn new(hidden_units: usize) -> Self {
        Self { hidden_units, ..Self::default() }
    }

    pub fn validate(&self) -> Result<(), AutoencoderError> {
        let bad = |msg: String| Err(AutoencoderError::InvalidConfig(msg));
        if self.hidden_units == 0 {
            return bad("hidden_units must be positive".into());
        }
        if !(self.beta >= 0.0 && self.lambda >= 0.0) {
            return bad(format!("beta {} and lambda {} must be nonnegative", self.beta, self.lambda));
        }
        if !(self.rho > 0.0 && self.rho < 1.0) {
            return bad(format!("rho {} outside (0, 1)", self.rho));
        }
        if self.max_epochs == 0 {
            return bad("max_epochs must be positive".into());
        }
        if !(self.learning_rate > 0.0 && self.learning_rate.is_finite()) {
            return bad(format!("learning_rate {} must be positive", self.learning_rate));
        }
        if !(0.0..1.0).contains(&self.momentum) {
            return bad(format!("momentum {} outside [0, 1)", self.momentum));
        }
        Ok(())
    }
}

impl Default for LayerConfig {
    fn default() -> Self {
        Self {
            hidden_units: 625,
            beta: 4.0,
            lambda: 0.004,
            rho: 0.15,
            max_epochs: 500,
            learning_rate: 0.1,
            momentum: 0.9,
            seed: 0,
            encoder_transfer: TransferKind::Logsig,
            decoder_transfer: TransferKind::Logsig,
        }
    }
}

/// Per-epoch loss trajectory of one trained layer.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct TrainReport {
    pub loss_total: Vec<f64>,
    pub loss_mse: Vec<f64>,
    pub loss_sparsity: Vec<f64>,
    pub loss_weights: Vec<f64>,
    /// Mean activation of each hidden unit under the trained weights.
    pub mean_activation: Vec<f64>,
}

impl TrainReport {
    pub fn epochs(&self) -> usize {
        self.loss_total.len()
    }

    /// Writes `epoch,loss_total,loss_mse,loss_sparsity,loss_weights` rows, epochs counted from 1.
    pub fn write_csv(&self, w: &mut impl Write) -> std::io::Result<()> {
        writeln!(w, "epoch,loss_total,loss_mse,loss_sparsity,loss_weights")?;
        for e in 0..self.epochs() {
            writeln!(
                w,
                "{},{},{},{},{}",
                e + 1,
                self.loss_total[e],
                self.loss_mse[e],
                self.loss_sparsity[e],
                self.loss_weights[e]
            )?;
        }
        Ok(())
    }

    pub fn save_csv(&self, path: &Path) -> std::io::Result<()> {
        let mut w = std::io::BufWriter::new(std::fs::File::create(path)?);
        self.write_csv(&mut w)?;
        w.flush()
    }
}

/// Parameter update rule applied once per epoch.
pub trait Optimizer {
    fn step(&mut self, layer: &mut SaeLayer, grads: &Gradients);
}

/// Gradient descent with classical momentum: `v <- mu v - lr g; p <- p + v`.
#[derive(Debug, Clone)]
pub struct MomentumDescent {
    learning_rate: f64,
    momentum: f64,
    velocity: Option<Gradients>,
}

impl MomentumDescent {
    pub fn new(learning_rate: f64, momentum: f64) -> Self {
        Self { learning_rate, momentum, velocity: None }
    }
}

impl Optimizer for MomentumDescent {
    fn step(&mut self, layer: &mut SaeLayer, grads: &Gradients) {
        let velocity = self.velocity.get_or_insert_with(|| Gradients {
            weights: Array2::zeros(grads.weights.raw_dim()),
            encode_bias: Array1::zeros(grads.encode_bias.len()),
            decode_bias: Array1::zeros(grads.decode_bias.len()),
        });
        let (mu, lr) = (self.momentum, self.learning_rate);
        velocity.weights.zip_mut_with(&grads.weights, |v, g| *v = mu * *v - lr * g);
        velocity.encode_bias.zip_mut_with(&grads.encode_bias, |v, g| *v = mu * *v - lr * g);
        velocity.decode_bias.zip_mut_with(&grads.decode_bias, |v, g| *v = mu * *v - lr * g);
        layer.weights += &velocity.weights;
        layer.encode_bias += &velocity.encode_bias;
        layer.decode_bias += &velocity.decode_bias;
    }
}

/// Seeded initial layer: weights uniform in `±sqrt(6 / (k_in + k_out))`, zero biases.
pub fn init_layer(input_dim: usize, config: &LayerConfig) -> SaeLayer {
    let hidden = config.hidden_units;
    let r = (6.0 / (input_dim + hidden) as f64).sqrt();
    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
    let weights = Array2::from_shape_simple_fn((hidden, input_dim), || rng.random_range(-r..=r));
    SaeLayer {
        weights,
        encode_bias: Array1::zeros(hidden),
        decode_bias: Array1::zeros(input_dim),
        encoder_transfer: config.encoder_transfer,
        decoder_transfer: config.decoder_transfer,
    }
}

/// Trains one layer by full-batch momentum descent on the rows of `data`.
///
/// The report records the loss evaluated before each epoch's update.
pub fn train_layer(data: ArrayView2<f64>, config: &LayerConfig) -> Result<(SaeLayer, TrainReport), AutoencoderError> {
    config.validate()?;
    let (n, dim) = data.dim();
    if n < 2 {
        return Err(AutoencoderError::TooFewSamples(n));
    }
    if config.hidden_units >= dim {
        return Err(AutoencoderError::InvalidConfig(format!(
            "hidden_units {} must be smaller than the input dimension {dim}",
            config.hidden_units
        )));
    }

    let mut layer = init_layer(dim, config);
    let mut optimizer = MomentumDescent::new(config.learning_rate, config.momentum);
    let mut report = TrainReport::default();

    for epoch in 1..=config.max_epochs {
        let (parts, grads) = match layer_gradients(&layer, config, data) {
            Ok(r) => r,
            Err(AutoencoderError::Domain(_)) if epoch > 1 => return Err(AutoencoderError::Divergence { epoch }),
            Err(e) => return Err(e),
        };
        let total = parts.total(config.beta, config.lambda);
        let grads_finite = grads.weights.iter().chain(&grads.encode_bias).chain(&grads.decode_bias).all(|v| v.is_finite());
        if !total.is_finite() || !grads_finite {
            return Err(AutoencoderError::Divergence { epoch });
        }
        report.loss_total.push(total);
        report.loss_mse.push(parts.mse);
        report.loss_sparsity.push(parts.sparsity);
        report.loss_weights.push(parts.weights);
        optimizer.step(&mut layer, &grads);
    }

    if !layer.is_finite() {
        return Err(AutoencoderError::Divergence { epoch: config.max_epochs });
    }
    // final-state loss must also be finite for the layer to be usable
    let final_parts = layer_loss(&layer, config, data).map_err(|_| AutoencoderError::Divergence { epoch: config.max_epochs })?;
    if !final_parts.total(config.beta, config.lambda).is_finite() {
        return Err(AutoencoderError::Divergence { epoch: config.max_epochs });
    }
    report.mean_activation = super::layer::average_activation(&layer, data)?.to_vec();
    Ok((layer, report))
}

/// Greedy layer-wise training: each layer learns to reconstruct the codes of the one below.
pub fn train_stack(
    data: ArrayView2<f64>,
    configs: &[LayerConfig],
) -> Result<(StackedModel, Vec<TrainReport>), AutoencoderError> {
    if configs.is_empty() {
        return Err(AutoencoderError::InvalidConfig("no layers configured".into()));
    }
    let mut prev = data.ncols();
    for c in configs {
        if c.hidden_units >= prev {
            return Err(AutoencoderError::NotDecreasing { previous: prev, next: c.hidden_units });
        }
        prev = c.hidden_units;
    }

    let mut layers = Vec::with_capacity(configs.len());
    let mut reports = Vec::with_capacity(configs.len());
    let mut input: Option<Array2<f64>> = None;
    for config in configs {
        let current = input.as_ref().map_or(data, |a| a.view());
        let (layer, report) = train_layer(current, config)?;
        let codes = layer.encode_batch(current)?;
        layers.push(layer);
        reports.push(report);
        input = Some(codes);
    }
    let model = StackedModel::new(data.ncols(), layers, configs.to_vec())?;
    Ok((model, reports))
}
