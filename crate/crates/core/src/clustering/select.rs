//! Choosing the linkage method and metric with the best cophenetic correlation.

use std::fmt;

use ndarray::ArrayView2;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::cophenetic::cophenetic_correlation;
use super::linkage::{linkage_with, LinkageOptions, LinkageTree, MethodKind};
use super::metric::{pairwise_distance, DistanceMatrix, MetricKind};
use super::tree_ops::{extract_seeds, leaf_order, Seed};
use super::ClusteringError;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CellStatus {
    Ok,
    /// Centroid, median or Ward applied formally to a non-Euclidean metric.
    GeometryWarning,
    /// Not evaluated; scored as negative infinity.
    Skipped,
    /// Zero-variance distances; scored as 0.
    Degenerate,
}

impl fmt::Display for CellStatus {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            CellStatus::Ok => "ok",
            CellStatus::GeometryWarning => "geometry_warning",
            CellStatus::Skipped => "skipped",
            CellStatus::Degenerate => "degenerate",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GridCell {
    pub method: MethodKind,
    pub metric: MetricKind,
    #[serde(with = "score")]
    pub cophenet: f64,
    pub status: CellStatus,
}

/// JSON has no infinities; skipped cells are stored as `null`.
mod score {
    use serde::{Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(v: &f64, s: S) -> Result<S::Ok, S::Error> {
        if v.is_finite() {
            s.serialize_f64(*v)
        } else {
            s.serialize_none()
        }
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<f64, D::Error> {
        Ok(Option::<f64>::deserialize(d)?.unwrap_or(f64::NEG_INFINITY))
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct SelectOptions {
    /// Skip geometry-dependent methods under non-Euclidean metrics instead of scoring them.
    pub strict_geometry: bool,
}

/// Outcome of the method x metric search on one dataset.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ClusterRun {
    pub dataset_name: String,
    /// Every evaluated cell, method-major in the order the lists were given.
    pub grid: Vec<GridCell>,
    pub chosen_method: MethodKind,
    pub chosen_metric: MetricKind,
    pub chosen_cophenet: f64,
    pub tree: LinkageTree,
    pub seeds: Vec<Seed>,
    pub leaf_order: Vec<usize>,
    /// Distances under the chosen metric.
    pub distances: DistanceMatrix,
}

impl ClusterRun {
    pub fn n(&self) -> usize {
        self.tree.n_leaves()
    }

    /// Internal nodes of the dendrogram, `n - 1`.
    pub fn classes(&self) -> usize {
        self.tree.merges().len()
    }
}

struct CellResult {
    cell: GridCell,
    tree: Option<LinkageTree>,
}

fn evaluate(method: MethodKind, metric: MetricKind, dist: Option<&DistanceMatrix>, opts: SelectOptions) -> CellResult {
    let skipped = CellResult {
        cell: GridCell { method, metric, cophenet: f64::NEG_INFINITY, status: CellStatus::Skipped },
        tree: None,
    };
    let Some(dist) = dist else { return skipped };
    let geometry_issue = method.needs_euclidean() && !metric.is_euclidean_family();
    if geometry_issue && opts.strict_geometry {
        return skipped;
    }
    let Ok(tree) = linkage_with(dist, method, LinkageOptions { allow_non_euclidean: true }) else {
        return skipped;
    };
    let coph = cophenetic_correlation(&tree, dist).expect("tree built from this matrix");
    let status = if coph.degenerate {
        CellStatus::Degenerate
    } else if geometry_issue {
        CellStatus::GeometryWarning
    } else {
        CellStatus::Ok
    };
    CellResult { cell: GridCell { method, metric, cophenet: coph.value, status }, tree: Some(tree) }
}

/// Scores every (method, metric) pair and keeps the best tree.
///
/// The argmax takes the first maximum in method-major grid order. Metrics
/// that cannot be computed on `features` (e.g. cosine with a zero row) skip
/// their whole column.
pub fn select_best(
    features: ArrayView2<f64>,
    methods: &[MethodKind],
    metrics: &[MetricKind],
    opts: SelectOptions,
) -> Result<ClusterRun, ClusteringError> {
    if methods.is_empty() || metrics.is_empty() {
        return Err(ClusteringError::EmptyGrid);
    }
    let n = features.nrows();
    if n < 3 {
        return Err(ClusteringError::DegenerateData(n));
    }
    for m in metrics {
        m.validate()?;
    }

    let distances: Vec<Option<DistanceMatrix>> =
        metrics.par_iter().map(|&m| pairwise_distance(features, m).ok()).collect();

    let cells: Vec<(usize, MethodKind)> = methods.iter().copied().enumerate().collect();
    let results: Vec<CellResult> = cells
        .par_iter()
        .flat_map_iter(|&(_, method)| {
            metrics.iter().zip(&distances).map(move |(&metric, dist)| evaluate(method, metric, dist.as_ref(), opts))
        })
        .collect();

    let mut best: Option<usize> = None;
    for (i, r) in results.iter().enumerate() {
        if r.cell.status == CellStatus::Skipped {
            continue;
        }
        if best.is_none_or(|b| r.cell.cophenet > results[b].cell.cophenet) {
            best = Some(i);
        }
    }
    let best = best.ok_or(ClusteringError::AllPairsSkipped)?;

    let metric_index = best % metrics.len();
    let chosen = results[best].cell;
    let tree = results[best].tree.clone().expect("evaluated cell has a tree");
    let distances = distances[metric_index].clone().expect("evaluated metric has distances");
    Ok(ClusterRun {
        dataset_name: String::new(),
        grid: results.into_iter().map(|r| r.cell).collect(),
        chosen_method: chosen.method,
        chosen_metric: chosen.metric,
        chosen_cophenet: chosen.cophenet,
        seeds: extract_seeds(&tree),
        leaf_order: leaf_order(&tree),
        tree,
        distances,
    })
}
