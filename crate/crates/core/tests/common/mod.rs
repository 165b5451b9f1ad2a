//! Independent reference implementations used only by tests.
#![allow(dead_code)]

use ndarray::Array2;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use shapeclust::autoencoder::{layer_gradients, layer_loss, Gradients, LayerConfig, SaeLayer};
use shapeclust::clustering::{DistanceMatrix, MethodKind};

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn random_points(rng: &mut impl Rng, n: usize, k: usize) -> Array2<f64> {
    Array2::from_shape_simple_fn((n, k), || rng.random_range(-1.0..1.0))
}

/// Merge produced by the reference agglomeration.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NaiveMerge {
    pub left: usize,
    pub right: usize,
    pub height: f64,
    pub size: usize,
}

struct Cluster {
    id: usize,
    members: Vec<usize>,
    /// Per-member weight: uniform for unweighted methods, halved at every merge for weighted ones.
    weights: Vec<f64>,
}

fn bilinear(a: &Cluster, b: &Cluster, d: &dyn Fn(usize, usize) -> f64) -> f64 {
    let mut s = 0.0;
    for (i, &x) in a.members.iter().enumerate() {
        for (j, &y) in b.members.iter().enumerate() {
            s += a.weights[i] * b.weights[j] * d(x, y);
        }
    }
    s
}

/// Squared distance between the weighted centroids of `a` and `b`, written
/// purely in terms of pairwise squared distances.
fn centroid_gap(a: &Cluster, b: &Cluster, dist: &DistanceMatrix) -> f64 {
    let sq = |x: usize, y: usize| dist.get(x, y).powi(2);
    bilinear(a, b, &sq) - 0.5 * bilinear(a, a, &sq) - 0.5 * bilinear(b, b, &sq)
}

fn cluster_distance(method: MethodKind, a: &Cluster, b: &Cluster, dist: &DistanceMatrix) -> f64 {
    let pairs = || a.members.iter().flat_map(|&x| b.members.iter().map(move |&y| dist.get(x, y)));
    match method {
        MethodKind::Single => pairs().fold(f64::INFINITY, f64::min),
        MethodKind::Complete => pairs().fold(f64::NEG_INFINITY, f64::max),
        MethodKind::Average => pairs().sum::<f64>() / (a.members.len() * b.members.len()) as f64,
        MethodKind::Weighted => bilinear(a, b, &|x, y| dist.get(x, y)),
        MethodKind::Centroid | MethodKind::Median => centroid_gap(a, b, dist),
        MethodKind::Ward => {
            let (na, nb) = (a.members.len() as f64, b.members.len() as f64);
            2.0 * na * nb / (na + nb) * centroid_gap(a, b, dist)
        }
    }
}

/// O(n^3) agglomeration recomputing every inter-cluster distance from its
/// definition at each step. Same tie-break and height convention as the library.
pub fn naive_linkage(dist: &DistanceMatrix, method: MethodKind) -> Vec<NaiveMerge> {
    let n = dist.n();
    let weighted = matches!(method, MethodKind::Weighted | MethodKind::Median);
    let mut clusters: Vec<Cluster> = (0..n).map(|i| Cluster { id: i, members: vec![i], weights: vec![1.0] }).collect();
    let mut merges = Vec::new();
    for step in 0..n - 1 {
        let mut best: Option<(f64, (usize, usize), usize, usize)> = None;
        for a in 0..clusters.len() {
            for b in a + 1..clusters.len() {
                let v = cluster_distance(method, &clusters[a], &clusters[b], dist);
                let (ia, ib) = (clusters[a].id, clusters[b].id);
                let key = (ia.min(ib), ia.max(ib));
                if best.as_ref().is_none_or(|(bv, bk, _, _)| v < *bv || (v == *bv && key < *bk)) {
                    best = Some((v, key, a, b));
                }
            }
        }
        let (v, (left, right), a, b) = best.unwrap();
        let cb = clusters.remove(b);
        let ca = clusters.remove(a);
        let size = ca.members.len() + cb.members.len();
        let mut members = ca.members;
        members.extend(cb.members);
        let weights = if weighted {
            ca.weights.iter().chain(&cb.weights).map(|w| w / 2.0).collect()
        } else {
            vec![1.0 / size as f64; size]
        };
        let height = if method.needs_euclidean() { v.max(0.0).sqrt() } else { v };
        merges.push(NaiveMerge { left, right, height, size });
        clusters.push(Cluster { id: n + step, members, weights });
    }
    merges
}

/// Edge weights of a minimum spanning tree (Prim).
pub fn mst_weights(dist: &DistanceMatrix) -> Vec<f64> {
    let n = dist.n();
    let mut in_tree = vec![false; n];
    let mut best = vec![f64::INFINITY; n];
    best[0] = 0.0;
    let mut weights = Vec::new();
    for step in 0..n {
        let u = (0..n).filter(|&v| !in_tree[v]).min_by(|&a, &b| best[a].total_cmp(&best[b])).unwrap();
        in_tree[u] = true;
        if step > 0 {
            weights.push(best[u]);
        }
        for v in 0..n {
            if !in_tree[v] {
                best[v] = best[v].min(dist.get(u, v));
            }
        }
    }
    weights.sort_by(f64::total_cmp);
    weights
}

/// Textbook two-pass Pearson correlation.
pub fn pearson(x: &[f64], y: &[f64]) -> f64 {
    let n = x.len() as f64;
    let mx = x.iter().sum::<f64>() / n;
    let my = y.iter().sum::<f64>() / n;
    let cov: f64 = x.iter().zip(y).map(|(a, b)| (a - mx) * (b - my)).sum();
    let vx: f64 = x.iter().map(|a| (a - mx).powi(2)).sum();
    let vy: f64 = y.iter().map(|b| (b - my).powi(2)).sum();
    cov / (vx * vy).sqrt()
}

/// Central-difference gradient of the total layer loss.
pub fn finite_difference(layer: &SaeLayer, cfg: &LayerConfig, data: &Array2<f64>, eps: f64) -> Gradients {
    let total = |l: &SaeLayer| layer_loss(l, cfg, data.view()).unwrap().total(cfg.beta, cfg.lambda);
    let mut probe = layer.clone();
    let mut weights = Array2::zeros(layer.weights.raw_dim());
    for idx in ndarray::indices(layer.weights.raw_dim()) {
        let orig = probe.weights[idx];
        probe.weights[idx] = orig + eps;
        let up = total(&probe);
        probe.weights[idx] = orig - eps;
        let down = total(&probe);
        probe.weights[idx] = orig;
        weights[idx] = (up - down) / (2.0 * eps);
    }
    let mut encode_bias = layer.encode_bias.clone();
    for i in 0..encode_bias.len() {
        let orig = probe.encode_bias[i];
        probe.encode_bias[i] = orig + eps;
        let up = total(&probe);
        probe.encode_bias[i] = orig - eps;
        let down = total(&probe);
        probe.encode_bias[i] = orig;
        encode_bias[i] = (up - down) / (2.0 * eps);
    }
    let mut decode_bias = layer.decode_bias.clone();
    for i in 0..decode_bias.len() {
        let orig = probe.decode_bias[i];
        probe.decode_bias[i] = orig + eps;
        let up = total(&probe);
        probe.decode_bias[i] = orig - eps;
        let down = total(&probe);
        probe.decode_bias[i] = orig;
        decode_bias[i] = (up - down) / (2.0 * eps);
    }
    Gradients { weights, encode_bias, decode_bias }
}

fn block_error<'a>(a: impl Iterator<Item = &'a f64> + Clone, b: impl Iterator<Item = &'a f64> + Clone) -> f64 {
    let diff: f64 = a.clone().zip(b.clone()).map(|(x, y)| (x - y).powi(2)).sum::<f64>().sqrt();
    let na: f64 = a.map(|x| x * x).sum::<f64>().sqrt();
    let nb: f64 = b.map(|x| x * x).sum::<f64>().sqrt();
    diff / (na + nb).max(1e-12)
}

/// Largest per-block relative error `|a - b| / (|a| + |b|)` between analytic and numeric gradients.
pub fn gradient_error(layer: &SaeLayer, cfg: &LayerConfig, data: &Array2<f64>) -> f64 {
    let (_, analytic) = layer_gradients(layer, cfg, data.view()).unwrap();
    let numeric = finite_difference(layer, cfg, data, 1e-6);
    block_error(analytic.weights.iter(), numeric.weights.iter())
        .max(block_error(analytic.encode_bias.iter(), numeric.encode_bias.iter()))
        .max(block_error(analytic.decode_bias.iter(), numeric.decode_bias.iter()))
}
