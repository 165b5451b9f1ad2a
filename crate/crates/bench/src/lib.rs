//! Inputs shared by the benchmarks.

use ndarray::Array2;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use shapeclust::ingest::normalize_image;
use shapeclust::synth;

/// Uniform `[0, 1)` entries from a fixed seed.
pub fn random_matrix(rows: usize, cols: usize, seed: u64) -> Array2<f64> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    Array2::from_shape_simple_fn((rows, cols), || rng.random())
}

/// Normalized synthetic profiles, one row each.
pub fn profile_matrix(per_class: usize, seed: u64) -> Array2<f64> {
    let shapes = synth::generate(per_class, seed);
    let rows: Vec<Vec<f64>> = shapes
        .iter()
        .map(|s| normalize_image(&s.bitmap, 0.5).expect("synthetic shapes have ink"))
        .collect();
    Array2::from_shape_fn((rows.len(), rows[0].len()), |(i, j)| rows[i][j])
}
