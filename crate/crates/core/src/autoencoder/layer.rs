use ndarray::{Array1, Array2, ArrayView1, ArrayView2, Axis};

use super::transfer::TransferKind;
use super::AutoencoderError;

/// One autoencoder layer with tied weights.
///
/// The encoder maps `u -> f(W u + b_e)`; the decoder maps
/// `v -> g(Wᵀ v + b_d)`. Only `W` is stored.
#[derive(Debug, Clone, PartialEq)]
pub struct SaeLayer {
    /// `hidden x input` weight matrix.
    pub weights: Array2<f64>,
    pub encode_bias: Array1<f64>,
    pub decode_bias: Array1<f64>,
    pub encoder_transfer: TransferKind,
    pub decoder_transfer: TransferKind,
}

impl SaeLayer {
    pub fn new(
        weights: Array2<f64>,
        encode_bias: Array1<f64>,
        decode_bias: Array1<f64>,
        encoder_transfer: TransferKind,
        decoder_transfer: TransferKind,
    ) -> Result<Self, AutoencoderError> {
        let (k, d) = weights.dim();
        check_dim("encode bias", k, encode_bias.len())?;
        check_dim("decode bias", d, decode_bias.len())?;
        Ok(Self { weights, encode_bias, decode_bias, encoder_transfer, decoder_transfer })
    }

    /// All-zero layer of the given shape.
    pub fn zeros(hidden: usize, input: usize, encoder: TransferKind, decoder: TransferKind) -> Self {
        Self {
            weights: Array2::zeros((hidden, input)),
            encode_bias: Array1::zeros(hidden),
            decode_bias: Array1::zeros(input),
            encoder_transfer: encoder,
            decoder_transfer: decoder,
        }
    }

    pub fn input_dim(&self) -> usize {
        self.weights.ncols()
    }

    pub fn hidden_dim(&self) -> usize {
        self.weights.nrows()
    }

    pub fn is_finite(&self) -> bool {
        self.weights.iter().chain(&self.encode_bias).chain(&self.decode_bias).all(|v| v.is_finite())
    }

    /// Pre-activations `U Wᵀ + b_e` for a batch of row samples.
    pub(crate) fn encode_pre(&self, data: ArrayView2<f64>) -> Array2<f64> {
        data.dot(&self.weights.t()) + &self.encode_bias
    }

    /// Pre-activations `V W + b_d` for a batch of row codes.
    pub(crate) fn decode_pre(&self, codes: ArrayView2<f64>) -> Array2<f64> {
        codes.dot(&self.weights) + &self.decode_bias
    }

    /// Encodes a batch (rows are samples).
    pub fn encode_batch(&self, data: ArrayView2<f64>) -> Result<Array2<f64>, AutoencoderError> {
        check_dim("encoder input", self.input_dim(), data.ncols())?;
        Ok(self.encoder_transfer.apply(&self.encode_pre(data)))
    }

    /// Decodes a batch of codes (rows are samples).
    pub fn decode_batch(&self, codes: ArrayView2<f64>) -> Result<Array2<f64>, AutoencoderError> {
        check_dim("decoder input", self.hidden_dim(), codes.ncols())?;
        Ok(self.decoder_transfer.apply(&self.decode_pre(codes)))
    }
}

pub(crate) fn check_dim(what: &'static str, expected: usize, found: usize) -> Result<(), AutoencoderError> {
    if expected == found {
        Ok(())
    } else {
        Err(AutoencoderError::DimensionMismatch { what, expected, found })
    }
}

/// `f(W u + b_e)` for a single sample.
pub fn encode_layer(layer: &SaeLayer, u: ArrayView1<f64>) -> Result<Array1<f64>, AutoencoderError> {
    check_dim("encoder input", layer.input_dim(), u.len())?;
    Ok(layer.encoder_transfer.apply(&(layer.weights.dot(&u) + &layer.encode_bias)))
}

/// `g(Wᵀ v + b_d)` for a single code.
pub fn decode_layer(layer: &SaeLayer, v: ArrayView1<f64>) -> Result<Array1<f64>, AutoencoderError> {
    check_dim("decoder input", layer.hidden_dim(), v.len())?;
    Ok(layer.decoder_transfer.apply(&(layer.weights.t().dot(&v) + &layer.decode_bias)))
}

/// Mean encoder activation of each hidden unit over the rows of `data`.
pub fn average_activation(layer: &SaeLayer, data: ArrayView2<f64>) -> Result<Array1<f64>, AutoencoderError> {
    if data.nrows() == 0 {
        return Err(AutoencoderError::EmptyData);
    }
    let codes = layer.encode_batch(data)?;
    Ok(codes.mean_axis(Axis(0)).expect("nonempty batch"))
}
