//! Counting recommenders: friends-of-friends and shared followees.

use super::{Recommender, ScoreVector};
use crate::error::Result;
use crate::graph::{NodeId, Snapshot};

/// `|out(seed) ∩ in(j)|`: number of length-2 paths `seed -> a -> j`.
pub fn two_hops_scores(snap: &Snapshot, seed: NodeId) -> ScoreVector {
    let mut paths = vec![0u32; snap.node_count()];
    for &a in snap.out(seed) {
        for &j in snap.out(a as usize) {
            paths[j as usize] += 1;
        }
    }
    ScoreVector::from_fn(snap, seed, |j| f64::from(paths[j]))
}

/// `|out(seed) ∩ out(j)|`: number of nodes followed by both.
pub fn common_followed_scores(snap: &Snapshot, seed: NodeId) -> ScoreVector {
    let mut shared = vec![0u32; snap.node_count()];
    for &b in snap.out(seed) {
        for &j in snap.inc(b as usize) {
            shared[j as usize] += 1;
        }
    }
    ScoreVector::from_fn(snap, seed, |j| f64::from(shared[j]))
}

#[derive(Debug, Clone, Copy, Default)]
pub struct TwoHops;

impl Recommender for TwoHops {
    fn name(&self) -> &str {
        "2h"
    }

    fn scores(&self, snap: &Snapshot, seed: NodeId) -> Result<ScoreVector> {
        Ok(two_hops_scores(snap, seed))
    }
}

#[derive(Debug, Clone, Copy, Default)]
pub struct CommonFollowed;

impl Recommender for CommonFollowed {
    fn name(&self) -> &str {
        "cf"
    }

    fn scores(&self, snap: &Snapshot, seed: NodeId) -> Result<ScoreVector> {
        Ok(common_followed_scores(snap, seed))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::{prefix_labels, DirectedGraph};

    fn snap(n: usize, edges: &[(usize, usize)]) -> Snapshot {
        DirectedGraph::from_edges(prefix_labels(n, 0.0), edges.iter().copied())
            .unwrap()
            .snapshot()
    }

    #[test]
    fn two_hops_counts_paths() {
        // i=0, a=1, b=2, j=3
        let s = snap(4, &[(0, 1), (0, 2), (1, 3), (2, 3)]);
        let sv = two_hops_scores(&s, 0);
        assert_eq!(sv.score(3), Some(2.0));
        assert_eq!(sv.score(1), None);
        assert_eq!(sv.len(), 1);
    }

    #[test]
    fn two_hops_without_out_links_is_zero() {
        let s = snap(4, &[(1, 2), (2, 3)]);
        assert!(two_hops_scores(&s, 0).entries().iter().all(|e| e.1 == 0.0));
    }

    #[test]
    fn common_followed_counts_shared_targets() {
        // seed 0 follows a=1,b=2,c=3; j=4 follows b,c,d=5
        let s = snap(6, &[(0, 1), (0, 2), (0, 3), (4, 2), (4, 3), (4, 5)]);
        let sv = common_followed_scores(&s, 0);
        assert_eq!(sv.score(4), Some(2.0));
        assert_eq!(sv.score(5), Some(0.0));
        assert_eq!(sv.score(0), None);
    }

    #[test]
    fn disjoint_followees_score_zero() {
        let s = snap(5, &[(0, 1), (2, 3)]);
        assert_eq!(common_followed_scores(&s, 0).score(2), Some(0.0));
    }
}
