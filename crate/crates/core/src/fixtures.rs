//! Small stored hypergraphs with known answers.

use crate::hypergraph::{Hypergraph, Partition};

/// Four vertices, edges `{0,1,2}` (weight 1) and `{2,3}` (weight 2).
pub fn running_example() -> Hypergraph {
    Hypergraph::new(4, vec![(1.0, vec![0, 1, 2]), (2.0, vec![2, 3])]).expect("valid fixture")
}

/// Six vertices with weights `10, 0.1, 0.6, 10, 0.1` on which the minimum
/// hypergraph cut and the minimum clique-expansion cut disagree.
///
/// The hypergraph cut is minimized only by `{0,3,5}` (value 0.7), a 3/3
/// split. The clique-expansion cut is minimized only by `{2}` (value 0.605),
/// which severs one more edge.
pub fn bias_example() -> Hypergraph {
    Hypergraph::new(
        6,
        vec![
            (10.0, vec![0, 3, 5]),
            (0.1, vec![2, 4]),
            (0.6, vec![0, 1, 2, 4, 5]),
            (10.0, vec![1, 4]),
            (0.1, vec![0, 1, 2, 5]),
        ],
    )
    .expect("valid fixture")
}

/// Minimizer of the hypergraph cut on [`bias_example`].
pub fn bias_hypergraph_optimum() -> Partition {
    Partition::from_indices(6, &[0, 3, 5]).expect("valid fixture")
}

/// Minimizer of the clique-expansion cut on [`bias_example`].
pub fn bias_clique_optimum() -> Partition {
    Partition::from_indices(6, &[2]).expect("valid fixture")
}

/// Two groups `{0..4}` and `{5..9}`, each covered by three unit-weight
/// overlapping edges, joined by a single edge `{4,5}` of weight 0.1.
pub fn two_blobs() -> Hypergraph {
    Hypergraph::new(
        10,
        vec![
            (1.0, vec![0, 1, 2]),
            (1.0, vec![1, 2, 3]),
            (1.0, vec![2, 3, 4, 0]),
            (1.0, vec![5, 6, 7]),
            (1.0, vec![6, 7, 8]),
            (1.0, vec![7, 8, 9, 5]),
            (0.1, vec![4, 5]),
        ],
    )
    .expect("valid fixture")
}

/// Blob membership of [`two_blobs`]: class 0 for `0..5`, class 1 for `5..10`.
pub fn two_blobs_truth() -> Vec<usize> {
    (0..10).map(|v| usize::from(v >= 5)).collect()
}

/// Two unit-weight edges `{0,1}` and `{2,3}` with no shared vertex.
pub fn disjoint_pair() -> Hypergraph {
    Hypergraph::new(4, vec![(1.0, vec![0, 1]), (1.0, vec![2, 3])]).expect("valid fixture")
}
