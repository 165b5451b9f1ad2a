use ndarray::{ArrayView2, Axis, Zip};

use super::model::StackedModel;
use super::AutoencoderError;
use crate::numeric::{quantile_sorted, sorted};

/// Five-number summary, mean and skewness of per-sample reconstruction error.
#[derive(Debug, Clone, PartialEq)]
pub struct ReconstructionStats {
    /// Mean squared error of each sample, in input order.
    pub per_sample: Vec<f64>,
    pub min: f64,
    pub q1: f64,
    pub median: f64,
    pub q3: f64,
    pub max: f64,
    pub mean: f64,
    /// Moment coefficient of skewness; 0 when all errors are equal.
    pub skewness: f64,
}

impl ReconstructionStats {
    pub fn from_errors(per_sample: Vec<f64>) -> Result<Self, AutoencoderError> {
        if per_sample.is_empty() {
            return Err(AutoencoderError::EmptyData);
        }
        let s = sorted(&per_sample);
        let n = s.len() as f64;
        let mean = s.iter().sum::<f64>() / n;
        let m2 = s.iter().map(|e| (e - mean).powi(2)).sum::<f64>() / n;
        let m3 = s.iter().map(|e| (e - mean).powi(3)).sum::<f64>() / n;
        let skewness = if m2 > 0.0 { m3 / m2.powf(1.5) } else { 0.0 };
        Ok(Self {
            min: s[0],
            q1: quantile_sorted(&s, 0.25),
            median: quantile_sorted(&s, 0.5),
            q3: quantile_sorted(&s, 0.75),
            max: s[s.len() - 1],
            mean,
            skewness,
            per_sample,
        })
    }
}

/// Per-sample mean squared reconstruction error of `model` over the rows of `data`.
pub fn reconstruction_stats(model: &StackedModel, data: ArrayView2<f64>) -> Result<ReconstructionStats, AutoencoderError> {
    if data.nrows() == 0 {
        return Err(AutoencoderError::EmptyData);
    }
    let recon = model.reconstruct_batch(data)?;
    let mut sq = recon;
    Zip::from(&mut sq).and(data).for_each(|r, &u| *r = (*r - u) * (*r - u));
    let errors = sq.mean_axis(Axis(1)).expect("nonempty rows").to_vec();
    ReconstructionStats::from_errors(errors)
}
