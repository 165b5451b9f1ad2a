//! Composite training objective of a sparse autoencoder layer:
//! `beta * KL(rho || rho_hat) + lambda * sum(W^2) + mse`.

use ndarray::{ArrayView1, ArrayView2, Zip};

use super::train::LayerConfig;
use super::AutoencoderError;

/// The three terms of the layer objective, evaluated on one forward pass.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct LossParts {
    pub mse: f64,
    pub sparsity: f64,
    pub weights: f64,
}

impl LossParts {
    pub fn total(&self, beta: f64, lambda: f64) -> f64 {
        beta * self.sparsity + lambda * self.weights + self.mse
    }
}

/// Summed KL divergence between a Bernoulli(`rho`) target and each unit's
/// mean activation.
pub fn loss_sparsity(rho: f64, rho_hat: ArrayView1<f64>) -> Result<f64, AutoencoderError> {
    if !(rho > 0.0 && rho < 1.0) {
        return Err(AutoencoderError::Domain(format!("sparsity target {rho} outside (0, 1)")));
    }
    let mut sum = 0.0;
    for &r in rho_hat {
        if !(r > 0.0 && r < 1.0) {
            return Err(AutoencoderError::Domain(format!("mean activation {r} outside (0, 1)")));
        }
        sum += rho * (rho / r).ln() + (1.0 - rho) * ((1.0 - rho) / (1.0 - r)).ln();
    }
    Ok(sum)
}

/// Sum of squared weights.
pub fn loss_weights(weights: ArrayView2<f64>) -> f64 {
    weights.iter().map(|w| w * w).sum()
}

/// Squared reconstruction error averaged over samples and components.
pub fn loss_mse(data: ArrayView2<f64>, recon: ArrayView2<f64>) -> Result<f64, AutoencoderError> {
    if data.dim() != recon.dim() {
        return Err(AutoencoderError::DimensionMismatch {
            what: "reconstruction",
            expected: data.len(),
            found: recon.len(),
        });
    }
    if data.is_empty() {
        return Err(AutoencoderError::EmptyData);
    }
    let mut sum = 0.0;
    Zip::from(data).and(recon).for_each(|&u, &r| sum += (u - r) * (u - r));
    Ok(sum / data.len() as f64)
}

/// `beta * sparsity + lambda * weights + mse` with the config's coefficients.
pub fn loss_total(config: &LayerConfig, parts: &LossParts) -> f64 {
    parts.total(config.beta, config.lambda)
}
