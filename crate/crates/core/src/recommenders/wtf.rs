//! Who-to-follow: SALSA over the circle of trust.
//!
//! The circle of trust is the top of the seed's personalized PageRank. Its
//! members act as hubs on a bipartite graph whose authorities are everything
//! the hubs follow. Authority weights are the limit of the authority -> hub ->
//! authority walk started from the uniform distribution, computed in closed
//! form per connected component.

use super::{Recommender, ScoreVector};
use crate::error::Result;
use crate::graph::{NodeId, Snapshot};
use crate::pagerank::{personalized_pagerank, DEFAULT_TOL};

/// Top `size` nodes by PPR from `seed` (seed and zero-score nodes excluded);
/// equal scores are ordered by node id.
pub fn circle_of_trust(snap: &Snapshot, seed: NodeId, alpha: f64, size: usize) -> Result<Vec<NodeId>> {
    let pi = personalized_pagerank(snap, seed, alpha, DEFAULT_TOL)?;
    let mut ranked: Vec<NodeId> = (0..snap.node_count()).filter(|&j| j != seed && pi[j] > 0.0).collect();
    ranked.sort_by(|&a, &b| pi[b].total_cmp(&pi[a]).then(a.cmp(&b)));
    ranked.truncate(size);
    Ok(ranked)
}

/// Limit of the SALSA authority iteration started from the uniform
/// distribution, as `(authority, weight)` ascending by id.
///
/// The authority walk never moves mass between connected components of the
/// hub/authority graph, and inside a component it is irreducible and
/// aperiodic with stationary weights proportional to in-degree from the hubs.
/// A component holding `|A_c|` of the `|A|` authorities therefore ends with
/// weight `|A_c| / |A| * d(a) / sum_c d`.
pub fn salsa_authorities(snap: &Snapshot, hubs: &[NodeId]) -> Vec<(NodeId, f64)> {
    let mut authorities: Vec<NodeId> = hubs
        .iter()
        .flat_map(|&h| snap.out(h).iter().map(|&a| a as NodeId))
        .collect();
    authorities.sort_unstable();
    authorities.dedup();
    let m = authorities.len();
    if m == 0 {
        return Vec::new();
    }
    let index = |a: u32| authorities.binary_search(&(a as NodeId)).expect("authority listed");

    // Union the authorities sharing a hub; count in-degree from hubs.
    let mut parent: Vec<usize> = (0..m).collect();
    fn find(parent: &mut [usize], mut x: usize) -> usize {
        while parent[x] != x {
            parent[x] = parent[parent[x]];
            x = parent[x];
        }
        x
    }
    let mut degree = vec![0usize; m];
    for &h in hubs {
        let outs = snap.out(h);
        let Some(&first) = outs.first() else { continue };
        let root = find(&mut parent, index(first));
        for &a in outs {
            let k = index(a);
            degree[k] += 1;
            let r = find(&mut parent, k);
            parent[r] = root;
        }
    }
    let mut comp_size = vec![0usize; m];
    let mut comp_degree = vec![0usize; m];
    let roots: Vec<usize> = (0..m).map(|k| find(&mut parent, k)).collect();
    for k in 0..m {
        comp_size[roots[k]] += 1;
        comp_degree[roots[k]] += degree[k];
    }
    authorities
        .iter()
        .enumerate()
        .map(|(k, &a)| {
            let r = roots[k];
            let w = comp_size[r] as f64 / m as f64 * degree[k] as f64 / comp_degree[r] as f64;
            (a, w)
        })
        .collect()
}

/// SALSA authority weights over the seed's candidates; empty when the seed
/// reaches nobody.
pub fn wtf_scores(snap: &Snapshot, seed: NodeId, alpha: f64, cot_size: usize) -> Result<ScoreVector> {
    let cot = circle_of_trust(snap, seed, alpha, cot_size)?;
    if cot.is_empty() {
        return Ok(ScoreVector::empty(seed));
    }
    let auth = salsa_authorities(snap, &cot);
    let mut weights = vec![0.0; snap.node_count()];
    for (a, w) in auth {
        weights[a] = w;
    }
    Ok(ScoreVector::from_fn(snap, seed, |j| weights[j]))
}

#[derive(Debug, Clone)]
pub struct WhoToFollow {
    pub alpha: f64,
    pub cot_size: usize,
}

impl WhoToFollow {
    pub fn new(alpha: f64, cot_size: usize) -> Self {
        WhoToFollow { alpha, cot_size }
    }
}

impl Recommender for WhoToFollow {
    fn name(&self) -> &str {
        "wtf"
    }

    fn scores(&self, snap: &Snapshot, seed: NodeId) -> Result<ScoreVector> {
        wtf_scores(snap, seed, self.alpha, self.cot_size)
    }
}
