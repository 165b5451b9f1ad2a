//! Grayscale rendering of a reordered distance matrix.

use std::io::Write;
use std::path::Path;

use crate::clustering::DistanceMatrix;
use crate::numeric::{quantile_sorted, sorted};

/// Square 8-bit grayscale image, row-major.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GrayImage {
    pub side: usize,
    pub pixels: Vec<u8>,
}

impl GrayImage {
    pub fn get(&self, row: usize, col: usize) -> u8 {
        self.pixels[row * self.side + col]
    }

    /// Binary PGM (`P5`, maxval 255).
    pub fn to_pgm(&self) -> Vec<u8> {
        let mut out = format!("P5\n{} {}\n255\n", self.side, self.side).into_bytes();
        out.extend_from_slice(&self.pixels);
        out
    }

    pub fn save_pgm(&self, path: &Path) -> std::io::Result<()> {
        std::fs::File::create(path)?.write_all(&self.to_pgm())
    }
}

/// Renders `dist` with rows and columns in `order`.
///
/// Distances at or below the `clip_lo` percentile are black, at or above
/// `clip_hi` white, linear in between, so similar profiles form dark
/// blocks along the black diagonal. When both percentiles coincide every
/// off-diagonal pixel is mid-gray.
pub fn render_distance_matrix(dist: &DistanceMatrix, order: &[usize], clip_lo: f64, clip_hi: f64) -> GrayImage {
    let n = dist.n();
    assert_eq!(order.len(), n, "order must be a permutation of the observations");
    let values = sorted(dist.condensed());
    let (lo, hi) = if values.is_empty() {
        (0.0, 0.0)
    } else {
        (quantile_sorted(&values, clip_lo / 100.0), quantile_sorted(&values, clip_hi / 100.0))
    };

    let mut pixels = Vec::with_capacity(n * n);
    for &i in order {
        for &j in order {
            let px = if i == j {
                0
            } else if hi <= lo {
                128
            } else {
                let t = ((dist.get(i, j) - lo) / (hi - lo)).clamp(0.0, 1.0);
                (255.0 * t).round() as u8
            };
            pixels.push(px);
        }
    }
    GrayImage { side: n, pixels }
}
