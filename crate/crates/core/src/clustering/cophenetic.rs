use super::linkage::LinkageTree;
use super::metric::DistanceMatrix;
use super::ClusteringError;

/// Merge height at which each pair of leaves first shares a cluster.
pub fn cophenetic_distances(tree: &LinkageTree) -> DistanceMatrix {
    let n = tree.n_leaves();
    let mut condensed = vec![0.0; n * n.saturating_sub(1) / 2];
    let idx = |i: usize, j: usize| n * i - i * (i + 1) / 2 + (j - i - 1);
    let members = tree.members();
    for m in tree.merges() {
        for &a in &members[m.left] {
            for &b in &members[m.right] {
                let (i, j) = (a.min(b), a.max(b));
                condensed[idx(i, j)] = m.height;
            }
        }
    }
    DistanceMatrix::from_condensed(n, condensed).expect("merge heights are finite and nonnegative")
}

/// Pearson correlation between a tree's cophenetic distances and the input distances.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Cophenet {
    pub value: f64,
    /// One of the two distance vectors had zero variance; `value` is then 0.
    pub degenerate: bool,
}

pub fn cophenetic_correlation(tree: &LinkageTree, dist: &DistanceMatrix) -> Result<Cophenet, ClusteringError> {
    if tree.n_leaves() != dist.n() {
        return Err(ClusteringError::SizeMismatch { expected: dist.n(), found: tree.n_leaves() });
    }
    let coph = cophenetic_distances(tree);
    Ok(pearson(dist.condensed(), coph.condensed()))
}

pub(crate) fn pearson(x: &[f64], y: &[f64]) -> Cophenet {
    let n = x.len() as f64;
    if x.is_empty() {
        return Cophenet { value: 0.0, degenerate: true };
    }
    let mx = x.iter().sum::<f64>() / n;
    let my = y.iter().sum::<f64>() / n;
    let (mut sxy, mut sxx, mut syy) = (0.0, 0.0, 0.0);
    for (a, b) in x.iter().zip(y) {
        let (da, db) = (a - mx, b - my);
        sxy += da * db;
        sxx += da * da;
        syy += db * db;
    }
    if sxx == 0.0 || syy == 0.0 {
        return Cophenet { value: 0.0, degenerate: true };
    }
    // sqrt(fl(s * s)) == s, so identical vectors score exactly 1
    Cophenet { value: (sxy / (sxx * syy).sqrt()).clamp(-1.0, 1.0), degenerate: false }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::clustering::linkage::{linkage, Merge, MethodKind};
    use crate::clustering::metric::{pairwise_distance, MetricKind};
    use ndarray::arr2;

    #[test]
    fn line_example() {
        let d = pairwise_distance(arr2(&[[0.0], [1.0], [10.0]]).view(), MetricKind::Euclidean).unwrap();
        let t = linkage(&d, MethodKind::Single).unwrap();
        let c = cophenetic_distances(&t);
        assert_eq!((c.get(0, 1), c.get(0, 2), c.get(1, 2)), (1.0, 9.0, 9.0));
    }

    #[test]
    fn two_leaves() {
        let t = LinkageTree::new(2, vec![Merge { left: 0, right: 1, height: 2.5, size: 2 }]).unwrap();
        assert_eq!(cophenetic_distances(&t).condensed(), &[2.5]);
    }

    #[test]
    fn equidistant_points_under_average() {
        let d = DistanceMatrix::from_condensed(4, vec![3.0; 6]).unwrap();
        let t = linkage(&d, MethodKind::Average).unwrap();
        assert_eq!(cophenetic_distances(&t).condensed(), &[3.0; 6]);
        let c = cophenetic_correlation(&t, &d).unwrap();
        assert_eq!(c, Cophenet { value: 0.0, degenerate: true });
    }

    #[test]
    fn perfect_ultrametric_scores_one() {
        // ((0,1):1,(2,3):2):5
        let d = DistanceMatrix::from_condensed(4, vec![1.0, 5.0, 5.0, 5.0, 5.0, 2.0]).unwrap();
        let t = linkage(&d, MethodKind::Average).unwrap();
        assert_eq!(cophenetic_distances(&t), d);
        assert_eq!(cophenetic_correlation(&t, &d).unwrap().value, 1.0);
    }

    #[test]
    fn size_mismatch() {
        let d = DistanceMatrix::from_condensed(3, vec![1.0, 2.0, 3.0]).unwrap();
        let t = LinkageTree::new(2, vec![Merge { left: 0, right: 1, height: 1.0, size: 2 }]).unwrap();
        assert!(matches!(cophenetic_correlation(&t, &d), Err(ClusteringError::SizeMismatch { .. })));
    }
}
