//! Stacked encoder and its on-disk form.
//!
//! Model files start with the line `ssae-v1`, followed by one line of JSON
//! describing the stack (input dimension and, per layer, its shape,
//! transfer functions and training config including the seed). The rest
//! of the file is raw little-endian `f64` data, layer by layer: `W`
//! row-major (`hidden x input`), then the encode bias, then the decode
//! bias. The decoder matrix is always `Wᵀ` and is never written.

use std::fs::File;
use std::io::{BufRead, BufReader, BufWriter, Read, Write};
use std::path::Path;

use ndarray::{Array1, Array2, ArrayView1, ArrayView2};
use serde::{Deserialize, Serialize};

use super::layer::{check_dim, SaeLayer};
use super::train::LayerConfig;
use super::transfer::TransferKind;
use super::AutoencoderError;

pub const MODEL_FORMAT: &str = "ssae-v1";

#[derive(Debug, Clone, PartialEq)]
pub struct StackedModel {
    input_dim: usize,
    layers: Vec<SaeLayer>,
    configs: Vec<LayerConfig>,
}

impl StackedModel {
    pub fn new(input_dim: usize, layers: Vec<SaeLayer>, configs: Vec<LayerConfig>) -> Result<Self, AutoencoderError> {
        if layers.is_empty() {
            return Err(AutoencoderError::InvalidConfig("a model needs at least one layer".into()));
        }
        if configs.len() != layers.len() {
            return Err(AutoencoderError::InvalidConfig(format!(
                "{} configs for {} layers",
                configs.len(),
                layers.len()
            )));
        }
        let mut dim = input_dim;
        for layer in &layers {
            check_dim("stacked layer input", dim, layer.input_dim())?;
            dim = layer.hidden_dim();
        }
        Ok(Self { input_dim, layers, configs })
    }

    /// Wraps hand-built layers; configs are filled with defaults for each layer's shape.
    pub fn from_layers(input_dim: usize, layers: Vec<SaeLayer>) -> Result<Self, AutoencoderError> {
        let configs = layers
            .iter()
            .map(|l| LayerConfig {
                encoder_transfer: l.encoder_transfer,
                decoder_transfer: l.decoder_transfer,
                ..LayerConfig::new(l.hidden_dim())
            })
            .collect();
        Self::new(input_dim, layers, configs)
    }

    pub fn input_dim(&self) -> usize {
        self.input_dim
    }

    pub fn code_dim(&self) -> usize {
        self.layers.last().map_or(self.input_dim, |l| l.hidden_dim())
    }

    pub fn layers(&self) -> &[SaeLayer] {
        &self.layers
    }

    pub fn configs(&self) -> &[LayerConfig] {
        &self.configs
    }

    /// Deepest-layer code of every row of `data`.
    pub fn encode_batch(&self, data: ArrayView2<f64>) -> Result<Array2<f64>, AutoencoderError> {
        check_dim("model input", self.input_dim, data.ncols())?;
        let mut codes = data.to_owned();
        for layer in &self.layers {
            codes = layer.encode_batch(codes.view())?;
        }
        Ok(codes)
    }

    /// Encodes then decodes through all layers in reverse order.
    pub fn reconstruct_batch(&self, data: ArrayView2<f64>) -> Result<Array2<f64>, AutoencoderError> {
        let mut out = self.encode_batch(data)?;
        for layer in self.layers.iter().rev() {
            out = layer.decode_batch(out.view())?;
        }
        Ok(out)
    }

    pub fn save(&self, path: &Path) -> Result<(), AutoencoderError> {
        let mut w = BufWriter::new(File::create(path)?);
        self.write_to(&mut w)?;
        w.flush()?;
        Ok(())
    }

    pub fn load(path: &Path) -> Result<Self, AutoencoderError> {
        Self::read_from(&mut BufReader::new(File::open(path)?))
    }

    pub fn write_to(&self, w: &mut impl Write) -> Result<(), AutoencoderError> {
        let header = ModelHeader {
            input_dim: self.input_dim,
            layers: self
                .layers
                .iter()
                .zip(&self.configs)
                .map(|(l, c)| LayerHeader {
                    input: l.input_dim(),
                    hidden: l.hidden_dim(),
                    encoder: l.encoder_transfer,
                    decoder: l.decoder_transfer,
                    config: c.clone(),
                })
                .collect(),
        };
        writeln!(w, "{MODEL_FORMAT}")?;
        serde_json::to_writer(&mut *w, &header).map_err(|e| AutoencoderError::ModelFormat(e.to_string()))?;
        writeln!(w)?;
        for layer in &self.layers {
            for v in layer.weights.iter().chain(&layer.encode_bias).chain(&layer.decode_bias) {
                w.write_all(&v.to_le_bytes())?;
            }
        }
        Ok(())
    }

    pub fn read_from(r: &mut impl BufRead) -> Result<Self, AutoencoderError> {
        let bad = |m: String| AutoencoderError::ModelFormat(m);
        let mut line = String::new();
        r.read_line(&mut line)?;
        if line.trim_end() != MODEL_FORMAT {
            return Err(bad(format!("expected {MODEL_FORMAT:?} header, found {:?}", line.trim_end())));
        }
        line.clear();
        r.read_line(&mut line)?;
        let header: ModelHeader = serde_json::from_str(&line).map_err(|e| bad(e.to_string()))?;

        let mut layers = Vec::with_capacity(header.layers.len());
        let mut configs = Vec::with_capacity(header.layers.len());
        for lh in header.layers {
            let (k, d) = (lh.hidden, lh.input);
            let weights = Array2::from_shape_vec((k, d), read_f64s(r, k * d)?).map_err(|e| bad(e.to_string()))?;
            let encode_bias = Array1::from(read_f64s(r, k)?);
            let decode_bias = Array1::from(read_f64s(r, d)?);
            layers.push(SaeLayer::new(weights, encode_bias, decode_bias, lh.encoder, lh.decoder)?);
            configs.push(lh.config);
        }
        let mut rest = Vec::new();
        r.read_to_end(&mut rest)?;
        if !rest.is_empty() {
            return Err(bad(format!("{} trailing bytes", rest.len())));
        }
        Self::new(header.input_dim, layers, configs)
    }
}

fn read_f64s(r: &mut impl Read, count: usize) -> Result<Vec<f64>, AutoencoderError> {
    let mut bytes = vec![0u8; count * 8];
    r.read_exact(&mut bytes)
        .map_err(|_| AutoencoderError::ModelFormat("truncated weight data".into()))?;
    Ok(bytes.chunks_exact(8).map(|c| f64::from_le_bytes(c.try_into().expect("8 bytes"))).collect())
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct ModelHeader {
    input_dim: usize,
    layers: Vec<LayerHeader>,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct LayerHeader {
    input: usize,
    hidden: usize,
    encoder: TransferKind,
    decoder: TransferKind,
    config: LayerConfig,
}

/// Signature of one sample: its code in the deepest layer.
pub fn encode(model: &StackedModel, u: ArrayView1<f64>) -> Result<Array1<f64>, AutoencoderError> {
    check_dim("model input", model.input_dim, u.len())?;
    let codes = model.encode_batch(u.insert_axis(ndarray::Axis(0)))?;
    Ok(codes.row(0).to_owned())
}

/// Encode then decode a single sample.
pub fn reconstruct(model: &StackedModel, u: ArrayView1<f64>) -> Result<Array1<f64>, AutoencoderError> {
    check_dim("model input", model.input_dim, u.len())?;
    let out = model.reconstruct_batch(u.insert_axis(ndarray::Axis(0)))?;
    Ok(out.row(0).to_owned())
}
