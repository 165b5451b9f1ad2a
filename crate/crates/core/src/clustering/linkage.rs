//! Agglomerative clustering by the Lance–Williams recurrence.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use super::metric::DistanceMatrix;
use super::ClusteringError;

/// Rule for the distance between two clusters.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum MethodKind {
    /// Shortest distance.
    Single,
    /// Farthest distance.
    Complete,
    /// UPGMA.
    Average,
    /// WPGMA.
    Weighted,
    /// UPGMC.
    Centroid,
    /// WPGMC.
    Median,
    /// Minimum variance.
    Ward,
}

impl MethodKind {
    pub const ALL: [MethodKind; 7] = [
        MethodKind::Single,
        MethodKind::Complete,
        MethodKind::Average,
        MethodKind::Weighted,
        MethodKind::Centroid,
        MethodKind::Median,
        MethodKind::Ward,
    ];

    /// Methods whose recurrence assumes squared Euclidean geometry.
    pub fn needs_euclidean(self) -> bool {
        matches!(self, MethodKind::Centroid | MethodKind::Median | MethodKind::Ward)
    }

    fn name(self) -> &'static str {
        match self {
            MethodKind::Single => "single",
            MethodKind::Complete => "complete",
            MethodKind::Average => "average",
            MethodKind::Weighted => "weighted",
            MethodKind::Centroid => "centroid",
            MethodKind::Median => "median",
            MethodKind::Ward => "ward",
        }
    }
}

impl fmt::Display for MethodKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for MethodKind {
    type Err = ClusteringError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        MethodKind::ALL
            .into_iter()
            .find(|m| m.name() == s)
            .ok_or_else(|| ClusteringError::UnknownName(s.to_string()))
    }
}

impl Serialize for MethodKind {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(self.name())
    }
}

impl<'de> Deserialize<'de> for MethodKind {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

/// One agglomeration step. Node ids below `n_leaves` are observations;
/// merge `k` creates node `n_leaves + k`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Merge {
    pub left: usize,
    pub right: usize,
    pub height: f64,
    pub size: usize,
}

/// Dendrogram as the ordered list of its merges.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawTree")]
pub struct LinkageTree {
    n_leaves: usize,
    merges: Vec<Merge>,
}

#[derive(Deserialize)]
struct RawTree {
    n_leaves: usize,
    merges: Vec<Merge>,
}

impl TryFrom<RawTree> for LinkageTree {
    type Error = ClusteringError;

    fn try_from(raw: RawTree) -> Result<Self, Self::Error> {
        Self::new(raw.n_leaves, raw.merges)
    }
}

impl LinkageTree {
    /// Checks that `merges` form a single binary tree over `n_leaves` leaves.
    pub fn new(n_leaves: usize, merges: Vec<Merge>) -> Result<Self, ClusteringError> {
        let bad = |m: String| Err(ClusteringError::InvalidTree(m));
        if n_leaves == 0 {
            return bad("a tree needs at least one leaf".into());
        }
        if merges.len() != n_leaves - 1 {
            return bad(format!("{} merges for {n_leaves} leaves", merges.len()));
        }
        let mut size = vec![1usize; n_leaves];
        let mut used = vec![false; 2 * n_leaves - 1];
        for (k, m) in merges.iter().enumerate() {
            let node = n_leaves + k;
            for child in [m.left, m.right] {
                if child >= node {
                    return bad(format!("merge {k} refers to node {child} before it exists"));
                }
                if std::mem::replace(&mut used[child], true) {
                    return bad(format!("node {child} merged twice"));
                }
            }
            if m.left == m.right {
                return bad(format!("merge {k} joins node {} with itself", m.left));
            }
            if !(m.height.is_finite() && m.height >= 0.0) {
                return bad(format!("merge {k} has height {}", m.height));
            }
            let s = size[m.left] + size[m.right];
            if s != m.size {
                return bad(format!("merge {k} has size {} but children sum to {s}", m.size));
            }
            size.push(s);
        }
        Ok(Self { n_leaves, merges })
    }

    pub fn n_leaves(&self) -> usize {
        self.n_leaves
    }

    pub fn merges(&self) -> &[Merge] {
        &self.merges
    }

    pub fn root(&self) -> usize {
        2 * self.n_leaves - 2
    }

    pub fn is_leaf(&self, node: usize) -> bool {
        node < self.n_leaves
    }

    /// Height of a node; leaves sit at 0.
    pub fn height(&self, node: usize) -> f64 {
        if self.is_leaf(node) {
            0.0
        } else {
            self.merges[node - self.n_leaves].height
        }
    }

    /// Children of an internal node.
    pub fn children(&self, node: usize) -> Option<(usize, usize)> {
        (!self.is_leaf(node)).then(|| {
            let m = &self.merges[node - self.n_leaves];
            (m.left, m.right)
        })
    }

    /// Smallest leaf id under every node, indexed by node id.
    pub(crate) fn min_leaf(&self) -> Vec<usize> {
        let mut min = (0..self.n_leaves).collect::<Vec<_>>();
        for m in &self.merges {
            min.push(min[m.left].min(min[m.right]));
        }
        min
    }

    /// Leaves under every node, indexed by node id.
    pub(crate) fn members(&self) -> Vec<Vec<usize>> {
        let mut members: Vec<Vec<usize>> = (0..self.n_leaves).map(|i| vec![i]).collect();
        for m in &self.merges {
            let mut joined = members[m.left].clone();
            joined.extend_from_slice(&members[m.right]);
            members.push(joined);
        }
        members
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct LinkageOptions {
    /// Run centroid, median and Ward on matrices from non-Euclidean metrics.
    pub allow_non_euclidean: bool,
}

/// Lance–Williams update of `d(k, i ∪ j)`.
///
/// `d_ki`, `d_kj`, `d_ij` are in the working space of the method (squared
/// distances for centroid, median and Ward).
#[inline]
fn lance_williams(method: MethodKind, d_ki: f64, d_kj: f64, d_ij: f64, n_i: f64, n_j: f64, n_k: f64) -> f64 {
    match method {
        MethodKind::Single => d_ki.min(d_kj),
        MethodKind::Complete => d_ki.max(d_kj),
        MethodKind::Average => (n_i * d_ki + n_j * d_kj) / (n_i + n_j),
        MethodKind::Weighted => 0.5 * (d_ki + d_kj),
        MethodKind::Centroid => {
            let n = n_i + n_j;
            (n_i * d_ki + n_j * d_kj) / n - n_i * n_j * d_ij / (n * n)
        }
        MethodKind::Median => 0.5 * (d_ki + d_kj) - 0.25 * d_ij,
        MethodKind::Ward => ((n_k + n_i) * d_ki + (n_k + n_j) * d_kj - n_k * d_ij) / (n_k + n_i + n_j),
    }
}

/// Maps a working-space dissimilarity to a reported merge height.
///
/// Squared-space methods report square roots. Their recurrences can leave the
/// metric cone on non-Euclidean input, so negative values are floored at 0.
pub(crate) fn working_to_height(method: MethodKind, v: f64) -> f64 {
    if method.needs_euclidean() {
        v.max(0.0).sqrt()
    } else {
        v
    }
}

/// Clusters with the default options: geometry-dependent methods reject
/// matrices computed with a non-Euclidean metric.
pub fn linkage(dist: &DistanceMatrix, method: MethodKind) -> Result<LinkageTree, ClusteringError> {
    linkage_with(dist, method, LinkageOptions::default())
}

/// Agglomerates the closest pair of clusters until one remains.
///
/// Ties in distance go to the lexicographically smallest `(smaller id, larger id)`
/// pair of node ids; each merge lists the smaller id as `left`.
pub fn linkage_with(dist: &DistanceMatrix, method: MethodKind, opts: LinkageOptions) -> Result<LinkageTree, ClusteringError> {
    if method.needs_euclidean() && !opts.allow_non_euclidean {
        if let Some(metric) = dist.metric().filter(|m| !m.is_euclidean_family()) {
            return Err(ClusteringError::IncompatibleMetric { method, metric });
        }
    }
    let n = dist.n();
    if n == 0 {
        return Err(ClusteringError::DegenerateData(0));
    }

    let squared = method.needs_euclidean();
    let mut work = vec![0.0; n * n];
    for i in 0..n {
        for j in i + 1..n {
            let d = dist.get(i, j);
            let v = if squared { d * d } else { d };
            work[i * n + j] = v;
            work[j * n + i] = v;
        }
    }

    // slot -> node id of the cluster living there, None once absorbed
    let mut node: Vec<Option<usize>> = (0..n).map(Some).collect();
    let mut size = vec![1usize; n];
    let mut merges = Vec::with_capacity(n.saturating_sub(1));

    for step in 0..n.saturating_sub(1) {
        let mut best: Option<(f64, (usize, usize), usize, usize)> = None;
        for a in 0..n {
            let Some(id_a) = node[a] else { continue };
            for b in a + 1..n {
                let Some(id_b) = node[b] else { continue };
                let v = work[a * n + b];
                let key = (id_a.min(id_b), id_a.max(id_b));
                let better = match &best {
                    None => true,
                    Some((bv, bkey, _, _)) => v < *bv || (v == *bv && key < *bkey),
                };
                if better {
                    best = Some((v, key, a, b));
                }
            }
        }
        let (v_ab, (left, right), a, b) = best.expect("at least two active clusters");
        let (n_a, n_b) = (size[a] as f64, size[b] as f64);
        for k in 0..n {
            if k == a || k == b || node[k].is_none() {
                continue;
            }
            let updated = lance_williams(method, work[k * n + a], work[k * n + b], v_ab, n_a, n_b, size[k] as f64);
            work[k * n + a] = updated;
            work[a * n + k] = updated;
        }
        size[a] += size[b];
        node[a] = Some(n + step);
        node[b] = None;
        merges.push(Merge { left, right, height: working_to_height(method, v_ab), size: size[a] });
    }

    LinkageTree::new(n, merges)
}
