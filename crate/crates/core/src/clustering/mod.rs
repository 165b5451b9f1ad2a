//! Agglomerative hierarchical clustering of feature vectors.

mod cophenetic;
mod export;
mod linkage;
mod metric;
mod select;
mod tree_ops;

pub use cophenetic::{cophenetic_correlation, cophenetic_distances, Cophenet};
pub use export::{parse_merge_list, parse_newick, to_newick, write_merge_list};
pub use linkage::{linkage, linkage_with, LinkageOptions, LinkageTree, Merge, MethodKind};
pub use metric::{pairwise_distance, DistanceMatrix, MetricKind};
pub use select::{select_best, CellStatus, ClusterRun, GridCell, SelectOptions};
pub use tree_ops::{cut_tree, extract_seeds, leaf_order, Seed};

#[derive(Debug, thiserror::Error)]
pub enum ClusteringError {
    #[error("too few observations: {0}")]
    DegenerateData(usize),
    #[error("cosine distance undefined for zero vector at row {0}")]
    ZeroVector(usize),
    #[error("feature matrix contains a non-finite value")]
    NonFiniteFeature,
    #[error("minkowski exponent {0} must be >= 1")]
    BadMinkowski(f64),
    #[error("invalid distance {0}")]
    InvalidDistance(f64),
    #[error("size mismatch: expected {expected}, found {found}")]
    SizeMismatch { expected: usize, found: usize },
    #[error("{method} linkage needs a Euclidean-family metric, got {metric}")]
    IncompatibleMetric { method: MethodKind, metric: MetricKind },
    #[error("invalid tree: {0}")]
    InvalidTree(String),
    #[error("cannot cut {n} leaves into {k} clusters")]
    BadCut { k: usize, n: usize },
    #[error("empty method or metric list")]
    EmptyGrid,
    #[error("every method/metric pair was skipped")]
    AllPairsSkipped,
    #[error("{found} labels for {expected} leaves")]
    LabelMismatch { expected: usize, found: usize },
    #[error("unknown method or metric {0:?}")]
    UnknownName(String),
    #[error("parse error: {0}")]
    Parse(String),
}
