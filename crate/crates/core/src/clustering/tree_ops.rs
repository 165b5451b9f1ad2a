use serde::{Deserialize, Serialize};

use super::linkage::LinkageTree;
use super::ClusteringError;

/// An internal node joining two single observations.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Seed {
    pub left: usize,
    pub right: usize,
    pub height: f64,
}

/// All leaf-leaf merges, lowest first (ties keep merge order), each with the smaller leaf on the left.
pub fn extract_seeds(tree: &LinkageTree) -> Vec<Seed> {
    let mut seeds: Vec<Seed> = tree
        .merges()
        .iter()
        .filter(|m| tree.is_leaf(m.left) && tree.is_leaf(m.right))
        .map(|m| Seed { left: m.left.min(m.right), right: m.left.max(m.right), height: m.height })
        .collect();
    seeds.sort_by(|a, b| a.height.total_cmp(&b.height));
    seeds
}

/// Leaves in dendrogram drawing order.
///
/// At every internal node the child holding the smaller leaf id is drawn first.
pub fn leaf_order(tree: &LinkageTree) -> Vec<usize> {
    let min_leaf = tree.min_leaf();
    let mut order = Vec::with_capacity(tree.n_leaves());
    let mut stack = vec![tree.root()];
    while let Some(node) = stack.pop() {
        match tree.children(node) {
            None => order.push(node),
            Some((a, b)) => {
                let (first, second) = if min_leaf[a] <= min_leaf[b] { (a, b) } else { (b, a) };
                stack.push(second);
                stack.push(first);
            }
        }
    }
    order
}

/// Flat labels from undoing the last `k - 1` merges.
///
/// Cluster labels are numbered by the smallest leaf they contain.
pub fn cut_tree(tree: &LinkageTree, k: usize) -> Result<Vec<usize>, ClusteringError> {
    let n = tree.n_leaves();
    if k == 0 || k > n {
        return Err(ClusteringError::BadCut { k, n });
    }
    let kept = n - k;
    let mut parent: Vec<usize> = (0..n + kept).collect();
    for (step, m) in tree.merges()[..kept].iter().enumerate() {
        parent[m.left] = n + step;
        parent[m.right] = n + step;
    }
    let root_of = |mut x: usize| {
        while parent[x] != x {
            x = parent[x];
        }
        x
    };
    let mut label_of_root = std::collections::HashMap::new();
    Ok((0..n)
        .map(|leaf| {
            let r = root_of(leaf);
            let next = label_of_root.len();
            *label_of_root.entry(r).or_insert(next)
        })
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::clustering::linkage::{linkage, Merge, MethodKind};
    use crate::clustering::metric::{pairwise_distance, MetricKind};
    use ndarray::{arr2, Array2};

    fn line_tree() -> LinkageTree {
        let d = pairwise_distance(arr2(&[[0.0], [1.0], [10.0]]).view(), MetricKind::Euclidean).unwrap();
        linkage(&d, MethodKind::Single).unwrap()
    }

    #[test]
    fn line_seeds_and_order() {
        let t = line_tree();
        assert_eq!(extract_seeds(&t), [Seed { left: 0, right: 1, height: 1.0 }]);
        assert_eq!(leaf_order(&t), [0, 1, 2]);
    }

    #[test]
    fn two_leaves() {
        let t = LinkageTree::new(2, vec![Merge { left: 0, right: 1, height: 1.0, size: 2 }]).unwrap();
        assert_eq!(leaf_order(&t), [0, 1]);
        assert_eq!(extract_seeds(&t).len(), 1);
    }

    #[test]
    fn twin_pairs_give_one_seed_each() {
        // 4 twin pairs, twins 0.01 apart, pairs 10 apart, interleaved ids
        let m = 4;
        let x = Array2::from_shape_fn((2 * m, 1), |(i, _)| (i % m) as f64 * 10.0 + (i / m) as f64 * 0.01);
        let d = pairwise_distance(x.view(), MetricKind::Euclidean).unwrap();
        let t = linkage(&d, MethodKind::Average).unwrap();
        let seeds = extract_seeds(&t);
        assert_eq!(seeds.len(), m);
        for s in seeds {
            assert_eq!(s.right, s.left + m);
        }
    }

    #[test]
    fn chain_has_one_seed() {
        let x = Array2::from_shape_fn((6, 1), |(i, _)| 2f64.powi(i as i32));
        let d = pairwise_distance(x.view(), MetricKind::Euclidean).unwrap();
        let t = linkage(&d, MethodKind::Single).unwrap();
        assert_eq!(extract_seeds(&t).len(), 1);
    }

    #[test]
    fn order_puts_smaller_leaf_subtree_first() {
        // merges: (3,4) then (0,2) then (1, 5) then (6, 7)
        let merges = vec![
            Merge { left: 3, right: 4, height: 1.0, size: 2 },
            Merge { left: 0, right: 2, height: 2.0, size: 2 },
            Merge { left: 1, right: 5, height: 3.0, size: 3 },
            Merge { left: 6, right: 7, height: 4.0, size: 5 },
        ];
        let t = LinkageTree::new(5, merges).unwrap();
        assert_eq!(leaf_order(&t), [0, 2, 1, 3, 4]);
        assert_eq!(cut_tree(&t, 2).unwrap(), [0, 1, 0, 1, 1]);
        assert_eq!(cut_tree(&t, 5).unwrap(), [0, 1, 2, 3, 4]);
        assert_eq!(cut_tree(&t, 1).unwrap(), [0; 5]);
        assert!(cut_tree(&t, 6).is_err());
    }
}
