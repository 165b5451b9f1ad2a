use std::fmt;
use std::str::FromStr;

use ndarray::{ArrayView1, ArrayView2, Axis};
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use super::ClusteringError;

/// Distance between two feature vectors.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum MetricKind {
    Euclidean,
    SquaredEuclidean,
    /// Euclidean after dividing each coordinate by its sample standard deviation.
    SEuclidean,
    CityBlock,
    Minkowski(f64),
    /// Maximum coordinate difference.
    Chebychev,
    /// One minus the cosine of the angle between the vectors.
    Cosine,
}

impl MetricKind {
    /// All seven metrics in report order (Minkowski with exponent 2).
    pub const ALL: [MetricKind; 7] = [
        MetricKind::Euclidean,
        MetricKind::SquaredEuclidean,
        MetricKind::SEuclidean,
        MetricKind::CityBlock,
        MetricKind::Minkowski(2.0),
        MetricKind::Chebychev,
        MetricKind::Cosine,
    ];

    /// Metrics under which centroid, median and Ward recurrences have a
    /// geometric meaning.
    pub fn is_euclidean_family(&self) -> bool {
        match self {
            MetricKind::Euclidean | MetricKind::SquaredEuclidean | MetricKind::SEuclidean => true,
            MetricKind::Minkowski(p) => *p == 2.0,
            _ => false,
        }
    }

    pub fn validate(&self) -> Result<(), ClusteringError> {
        match self {
            MetricKind::Minkowski(p) if !(*p >= 1.0 && p.is_finite()) => Err(ClusteringError::BadMinkowski(*p)),
            _ => Ok(()),
        }
    }
}

impl fmt::Display for MetricKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            MetricKind::Euclidean => f.write_str("euclidean"),
            MetricKind::SquaredEuclidean => f.write_str("squaredeuclidean"),
            MetricKind::SEuclidean => f.write_str("seuclidean"),
            MetricKind::CityBlock => f.write_str("cityblock"),
            MetricKind::Minkowski(p) if *p == 2.0 => f.write_str("minkowski"),
            MetricKind::Minkowski(p) => write!(f, "minkowski:{p}"),
            MetricKind::Chebychev => f.write_str("chebychev"),
            MetricKind::Cosine => f.write_str("cosine"),
        }
    }
}

impl FromStr for MetricKind {
    type Err = ClusteringError;

    /// Accepts the report names; `minkowski:<p>` selects another exponent.
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let m = match s {
            "euclidean" => MetricKind::Euclidean,
            "squaredeuclidean" => MetricKind::SquaredEuclidean,
            "seuclidean" => MetricKind::SEuclidean,
            "cityblock" => MetricKind::CityBlock,
            "minkowski" => MetricKind::Minkowski(2.0),
            "chebychev" => MetricKind::Chebychev,
            "cosine" => MetricKind::Cosine,
            other => match other.strip_prefix("minkowski:").map(str::parse::<f64>) {
                Some(Ok(p)) => MetricKind::Minkowski(p),
                _ => return Err(ClusteringError::UnknownName(other.to_string())),
            },
        };
        m.validate()?;
        Ok(m)
    }
}

impl Serialize for MetricKind {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for MetricKind {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

/// Symmetric dissimilarities in condensed form: the strict upper triangle, row by row.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawDistances")]
pub struct DistanceMatrix {
    n: usize,
    condensed: Vec<f64>,
    metric: Option<MetricKind>,
}

#[derive(Deserialize)]
struct RawDistances {
    n: usize,
    condensed: Vec<f64>,
    metric: Option<MetricKind>,
}

impl TryFrom<RawDistances> for DistanceMatrix {
    type Error = ClusteringError;

    fn try_from(raw: RawDistances) -> Result<Self, Self::Error> {
        let d = Self::from_condensed(raw.n, raw.condensed)?;
        Ok(Self { metric: raw.metric, ..d })
    }
}

impl DistanceMatrix {
    /// Wraps a condensed vector of length `n (n - 1) / 2`; entries must be finite and nonnegative.
    pub fn from_condensed(n: usize, condensed: Vec<f64>) -> Result<Self, ClusteringError> {
        if condensed.len() != n * n.saturating_sub(1) / 2 {
            return Err(ClusteringError::SizeMismatch { expected: n * n.saturating_sub(1) / 2, found: condensed.len() });
        }
        if let Some(&bad) = condensed.iter().find(|v| !(v.is_finite() && **v >= 0.0)) {
            return Err(ClusteringError::InvalidDistance(bad));
        }
        Ok(Self { n, condensed, metric: None })
    }

    /// Builds from a full square matrix, reading the upper triangle.
    pub fn from_square(square: ArrayView2<f64>) -> Result<Self, ClusteringError> {
        let n = square.nrows();
        let mut condensed = Vec::with_capacity(n * n.saturating_sub(1) / 2);
        for i in 0..n {
            for j in i + 1..n {
                condensed.push(square[(i, j)]);
            }
        }
        Self::from_condensed(n, condensed)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn condensed(&self) -> &[f64] {
        &self.condensed
    }

    /// Metric the matrix was computed with, when known.
    pub fn metric(&self) -> Option<MetricKind> {
        self.metric
    }

    pub(crate) fn with_metric(mut self, metric: MetricKind) -> Self {
        self.metric = Some(metric);
        self
    }

    #[inline]
    pub fn index(&self, i: usize, j: usize) -> usize {
        debug_assert!(i < j && j < self.n);
        self.n * i - i * (i + 1) / 2 + (j - i - 1)
    }

    /// Distance between observations `i` and `j`; zero on the diagonal.
    pub fn get(&self, i: usize, j: usize) -> f64 {
        match i.cmp(&j) {
            std::cmp::Ordering::Equal => 0.0,
            std::cmp::Ordering::Less => self.condensed[self.index(i, j)],
            std::cmp::Ordering::Greater => self.condensed[self.index(j, i)],
        }
    }

    /// Rows and columns reordered by `order` (new position -> old index), as a dense square.
    pub fn permuted_square(&self, order: &[usize]) -> Vec<Vec<f64>> {
        order.iter().map(|&i| order.iter().map(|&j| self.get(i, j)).collect()).collect()
    }
}

fn minkowski(x: ArrayView1<f64>, y: ArrayView1<f64>, p: f64) -> f64 {
    if p == 1.0 {
        return x.iter().zip(y).map(|(a, b)| (a - b).abs()).sum();
    }
    if p == 2.0 {
        return x.iter().zip(y).map(|(a, b)| (a - b) * (a - b)).sum::<f64>().sqrt();
    }
    x.iter().zip(y).map(|(a, b)| (a - b).abs().powf(p)).sum::<f64>().powf(1.0 / p)
}

/// Condensed pairwise distances between the rows of `features`.
pub fn pairwise_distance(features: ArrayView2<f64>, metric: MetricKind) -> Result<DistanceMatrix, ClusteringError> {
    metric.validate()?;
    let (n, k) = features.dim();
    if n < 2 {
        return Err(ClusteringError::DegenerateData(n));
    }
    if features.iter().any(|v| !v.is_finite()) {
        return Err(ClusteringError::NonFiniteFeature);
    }

    let mut scaled;
    let rows = match metric {
        MetricKind::SEuclidean => {
            let mean = features.mean_axis(Axis(0)).expect("n >= 2");
            scaled = features.to_owned();
            for c in 0..k {
                let col = features.column(c);
                let var = col.iter().map(|v| (v - mean[c]).powi(2)).sum::<f64>() / (n - 1) as f64;
                let sd = var.sqrt();
                let sd = if sd > 0.0 { sd } else { 1.0 };
                scaled.column_mut(c).mapv_inplace(|v| v / sd);
            }
            scaled.view()
        }
        _ => features,
    };

    let norms: Vec<f64> = match metric {
        MetricKind::Cosine => {
            let norms: Vec<f64> = rows.rows().into_iter().map(|r| r.dot(&r).sqrt()).collect();
            if let Some(i) = norms.iter().position(|&v| v == 0.0) {
                return Err(ClusteringError::ZeroVector(i));
            }
            norms
        }
        _ => Vec::new(),
    };

    let mut condensed = Vec::with_capacity(n * (n - 1) / 2);
    for i in 0..n {
        let x = rows.row(i);
        for j in i + 1..n {
            let y = rows.row(j);
            let d = match metric {
                MetricKind::Euclidean | MetricKind::SEuclidean => minkowski(x, y, 2.0),
                MetricKind::SquaredEuclidean => x.iter().zip(y).map(|(a, b)| (a - b) * (a - b)).sum(),
                MetricKind::CityBlock => minkowski(x, y, 1.0),
                MetricKind::Minkowski(p) => minkowski(x, y, p),
                MetricKind::Chebychev => x.iter().zip(y).fold(0.0, |m, (a, b)| f64::max(m, (a - b).abs())),
                MetricKind::Cosine => (1.0 - x.dot(&y) / (norms[i] * norms[j])).max(0.0),
            };
            condensed.push(d);
        }
    }
    Ok(DistanceMatrix::from_condensed(n, condensed)?.with_metric(metric))
}

#[cfg(test)]
mod tests {
    use super::*;
    use ndarray::{arr2, Array2};
    use proptest::prelude::*;

    fn pair(x: [f64; 2], y: [f64; 2], m: MetricKind) -> f64 {
        pairwise_distance(arr2(&[x, y]).view(), m).unwrap().get(0, 1)
    }

    #[test]
    fn hand_examples() {
        assert_eq!(pair([1.0, 3.0], [4.0, 1.0], MetricKind::Chebychev), 3.0);
        assert_eq!(pair([1.0, 0.0], [0.0, 2.0], MetricKind::Cosine), 1.0);
        assert_eq!(pair([0.0, 0.0], [1.0, -1.0], MetricKind::CityBlock), 2.0);
        assert_eq!(pair([0.0, 0.0], [3.0, 4.0], MetricKind::Euclidean), 5.0);
        assert_eq!(pair([0.0, 0.0], [3.0, 4.0], MetricKind::SquaredEuclidean), 25.0);
        let cube = pair([0.0, 0.0], [1.0, 1.0], MetricKind::Minkowski(3.0));
        assert!((cube - 2f64.powf(1.0 / 3.0)).abs() < 1e-15);
    }

    #[test]
    fn standardized_euclidean_uses_sample_std() {
        // std of {0, 2} with n - 1 denominator is sqrt(2) in both columns.
        let d = pair([0.0, 0.0], [2.0, 2.0], MetricKind::SEuclidean);
        assert!((d - 2.0).abs() < 1e-15, "{d}");
        // constant column falls back to unit scale
        let d = pair([1.0, 5.0], [1.0, 7.0], MetricKind::SEuclidean);
        assert!((d - 2f64.sqrt()).abs() < 1e-15, "{d}");
    }

    #[test]
    fn errors() {
        assert!(matches!(
            pairwise_distance(arr2(&[[0.0, 0.0], [1.0, 1.0]]).view(), MetricKind::Cosine),
            Err(ClusteringError::ZeroVector(0))
        ));
        assert!(matches!(
            pairwise_distance(arr2(&[[1.0, 1.0]]).view(), MetricKind::Euclidean),
            Err(ClusteringError::DegenerateData(1))
        ));
        assert!(matches!(
            pairwise_distance(arr2(&[[1.0], [2.0]]).view(), MetricKind::Minkowski(0.5)),
            Err(ClusteringError::BadMinkowski(_))
        ));
    }

    #[test]
    fn names_round_trip() {
        for m in MetricKind::ALL.into_iter().chain([MetricKind::Minkowski(3.5)]) {
            assert_eq!(m.to_string().parse::<MetricKind>().unwrap(), m);
        }
        assert!("manhattan".parse::<MetricKind>().is_err());
        assert!("minkowski:0.5".parse::<MetricKind>().is_err());
    }

    #[test]
    fn condensed_indexing() {
        let sq = Array2::from_shape_fn((4, 4), |(i, j)| if i == j { 0.0 } else { (i + j) as f64 + 10.0 * i.min(j) as f64 });
        let d = DistanceMatrix::from_square(sq.view()).unwrap();
        assert_eq!(d.condensed().len(), 6);
        for i in 0..4 {
            for j in 0..4 {
                assert_eq!(d.get(i, j), sq[(i.min(j), i.max(j))] * f64::from(u8::from(i != j)));
            }
        }
    }

    fn points() -> impl Strategy<Value = Array2<f64>> {
        (2usize..6, 1usize..5).prop_flat_map(|(n, k)| {
            proptest::collection::vec(-5.0f64..5.0, n * k)
                .prop_map(move |v| Array2::from_shape_vec((n, k), v).unwrap())
        })
    }

    proptest! {
        #[test]
        fn metric_axioms(x in points(), p in 1.0f64..4.0) {
            let n = x.nrows();
            let mut metrics = MetricKind::ALL.to_vec();
            metrics.push(MetricKind::Minkowski(p));
            for m in metrics {
                let Ok(d) = pairwise_distance(x.view(), m) else { continue };
                for i in 0..n {
                    prop_assert_eq!(d.get(i, i), 0.0);
                    for j in 0..n {
                        prop_assert!(d.get(i, j) >= 0.0);
                        prop_assert_eq!(d.get(i, j), d.get(j, i));
                    }
                }
                let triangle = matches!(
                    m,
                    MetricKind::Euclidean | MetricKind::CityBlock | MetricKind::Chebychev
                        | MetricKind::Minkowski(_) | MetricKind::SEuclidean
                );
                if triangle {
                    for i in 0..n {
                        for j in 0..n {
                            for l in 0..n {
                                prop_assert!(d.get(i, l) <= d.get(i, j) + d.get(j, l) + 1e-9, "{m} violates triangle");
                            }
                        }
                    }
                }
            }
            let e = pairwise_distance(x.view(), MetricKind::Euclidean).unwrap();
            let s = pairwise_distance(x.view(), MetricKind::SquaredEuclidean).unwrap();
            let m2 = pairwise_distance(x.view(), MetricKind::Minkowski(2.0)).unwrap();
            for (i, v) in e.condensed().iter().enumerate() {
                prop_assert!((v * v - s.condensed()[i]).abs() <= 1e-9 * (1.0 + s.condensed()[i]));
                prop_assert_eq!(*v, m2.condensed()[i]);
            }
        }
    }
}
