//! Unsupervised clustering of binary shape profiles.
//!
//! Drawings are normalized onto a 128x128 canvas ([`ingest`]), compressed by a
//! stacked sparse autoencoder ([`autoencoder`]) and grouped by agglomerative
//! hierarchical clustering whose linkage method and metric are chosen by
//! cophenetic correlation ([`clustering`]). [`pipeline`] wires the stages
//! together and writes the reports.

pub mod autoencoder;
pub mod clustering;
pub mod ingest;
pub mod matrix_io;
pub mod numeric;
pub mod pipeline;
pub mod synth;

pub use autoencoder::{LayerConfig, SaeLayer, StackedModel, TrainReport, TransferKind};
pub use clustering::{ClusterRun, DistanceMatrix, LinkageTree, MethodKind, MetricKind};
pub use ingest::{Dataset, ProfileMeta, ProfileRecord};
pub use matrix_io::Matrix;
pub use pipeline::{ExperimentConfig, RunArtifacts};
