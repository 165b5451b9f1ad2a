//! Exact gradients of the layer objective under tied weights.

use ndarray::{Array1, Array2, ArrayView2, Axis};

use super::layer::{check_dim, SaeLayer};
use super::loss::{loss_mse, loss_sparsity, loss_weights, LossParts};
use super::train::LayerConfig;
use super::AutoencoderError;

/// Intermediate values of one full-batch forward pass.
#[derive(Debug, Clone)]
pub(crate) struct ForwardPass {
    pub pre_hidden: Array2<f64>,
    pub hidden: Array2<f64>,
    pub pre_out: Array2<f64>,
    pub recon: Array2<f64>,
    pub rho_hat: Array1<f64>,
}

pub(crate) fn forward(layer: &SaeLayer, data: ArrayView2<f64>) -> Result<ForwardPass, AutoencoderError> {
    if data.nrows() == 0 {
        return Err(AutoencoderError::EmptyData);
    }
    check_dim("layer input", layer.input_dim(), data.ncols())?;
    let pre_hidden = layer.encode_pre(data);
    let hidden = layer.encoder_transfer.apply(&pre_hidden);
    let pre_out = layer.decode_pre(hidden.view());
    let recon = layer.decoder_transfer.apply(&pre_out);
    let rho_hat = hidden.mean_axis(Axis(0)).expect("nonempty batch");
    Ok(ForwardPass { pre_hidden, hidden, pre_out, recon, rho_hat })
}

fn parts_of(
    layer: &SaeLayer,
    config: &LayerConfig,
    data: ArrayView2<f64>,
    pass: &ForwardPass,
) -> Result<LossParts, AutoencoderError> {
    // With beta = 0 the KL term is irrelevant and may be undefined (e.g. purelin codes).
    let sparsity = if config.beta == 0.0 { 0.0 } else { loss_sparsity(config.rho, pass.rho_hat.view())? };
    Ok(LossParts {
        mse: loss_mse(data, pass.recon.view())?,
        sparsity,
        weights: loss_weights(layer.weights.view()),
    })
}

/// Evaluates the three loss terms on `data` (rows are samples).
pub fn layer_loss(layer: &SaeLayer, config: &LayerConfig, data: ArrayView2<f64>) -> Result<LossParts, AutoencoderError> {
    let pass = forward(layer, data)?;
    parts_of(layer, config, data, &pass)
}

/// Gradient of the layer objective with respect to each parameter block.
#[derive(Debug, Clone, PartialEq)]
pub struct Gradients {
    pub weights: Array2<f64>,
    pub encode_bias: Array1<f64>,
    pub decode_bias: Array1<f64>,
}

/// Loss terms and analytic gradients on the full batch `data`.
///
/// `W` collects three contributions: the decoder path through `Wᵀ`, the
/// encoder path (which also carries the KL term through the batch mean
/// activation), and the weight decay `2 lambda W`.
pub fn layer_gradients(
    layer: &SaeLayer,
    config: &LayerConfig,
    data: ArrayView2<f64>,
) -> Result<(LossParts, Gradients), AutoencoderError> {
    let pass = forward(layer, data)?;
    let parts = parts_of(layer, config, data, &pass)?;

    let n = data.nrows() as f64;
    let scale = 2.0 / data.len() as f64;

    // d/d(pre_out) of the mse term
    let mut d_out = (&pass.recon - &data) * scale;
    d_out *= &layer.decoder_transfer.derivative(&pass.pre_out);

    let mut d_weights = pass.hidden.t().dot(&d_out);
    let d_decode_bias = d_out.sum_axis(Axis(0));

    let mut d_hidden = d_out.dot(&layer.weights.t());
    if config.beta != 0.0 {
        let rho = config.rho;
        let d_rho_hat = pass.rho_hat.mapv(|r| config.beta * (-rho / r + (1.0 - rho) / (1.0 - r)) / n);
        d_hidden += &d_rho_hat;
    }
    d_hidden *= &layer.encoder_transfer.derivative(&pass.pre_hidden);

    d_weights += &d_hidden.t().dot(&data);
    d_weights.scaled_add(2.0 * config.lambda, &layer.weights);
    let d_encode_bias = d_hidden.sum_axis(Axis(0));

    Ok((parts, Gradients { weights: d_weights, encode_bias: d_encode_bias, decode_bias: d_decode_bias }))
}
