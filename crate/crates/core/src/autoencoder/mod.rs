//! Stacked sparse autoencoder with tied weights, trained greedily layer by layer.

mod gradient;
mod layer;
mod loss;
mod model;
mod stats;
mod train;
mod transfer;

pub use gradient::{layer_gradients, layer_loss, Gradients};
pub use layer::{average_activation, decode_layer, encode_layer, SaeLayer};
pub use loss::{loss_mse, loss_sparsity, loss_total, loss_weights, LossParts};
pub use model::{encode, reconstruct, StackedModel, MODEL_FORMAT};
pub use stats::{reconstruction_stats, ReconstructionStats};
pub use train::{init_layer, train_layer, train_stack, LayerConfig, MomentumDescent, Optimizer, TrainReport};
pub use transfer::{transfer_apply, transfer_derivative, TransferKind};

#[derive(Debug, thiserror::Error)]
pub enum AutoencoderError {
    #[error("{what}: expected dimension {expected}, found {found}")]
    DimensionMismatch { what: &'static str, expected: usize, found: usize },
    #[error("no samples")]
    EmptyData,
    #[error("need at least 2 samples to train, got {0}")]
    TooFewSamples(usize),
    #[error("domain error: {0}")]
    Domain(String),
    #[error("training diverged at epoch {epoch}")]
    Divergence { epoch: usize },
    #[error("hidden layer sizes must strictly decrease: {next} after {previous}")]
    NotDecreasing { previous: usize, next: usize },
    #[error("invalid layer config: {0}")]
    InvalidConfig(String),
    #[error("model file: {0}")]
    ModelFormat(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}
