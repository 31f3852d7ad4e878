//! The recommendation feedback loop.
//!
//! One step: freeze a snapshot, compute every node's top-1 recommendation from
//! it, then in ascending node order add each accepted link and remove one
//! random older out-link of the same node. When that node had no other
//! out-link a random edge elsewhere is removed instead, so the edge count never
//! changes.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::{DirectedGraph, NodeId, Snapshot};
use crate::metrics::MetricsSnapshot;
use crate::recommenders::{top_k, Recommender, RecommenderKind, StepContext, ZeroScorePolicy};
use crate::rng::{stream, Purpose};

pub const DEFAULT_STEPS: usize = 30;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SimulationConfig {
    pub recommender: RecommenderKind,
    pub steps: usize,
    pub k: usize,
    pub seed: u64,
    #[serde(default)]
    pub zero_scores: ZeroScorePolicy,
}

impl SimulationConfig {
    pub fn new(recommender: RecommenderKind, seed: u64) -> Self {
        SimulationConfig {
            recommender,
            steps: DEFAULT_STEPS,
            k: 1,
            seed,
            zero_scores: ZeroScorePolicy::Exclude,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.k != 1 {
            return Err(Error::InvalidArgument(format!("only k = 1 is supported, got {}", self.k)));
        }
        self.recommender.validate()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StepRecord {
    pub step: usize,
    pub edges_added: usize,
    pub edges_removed: usize,
    /// Removals that fell back to a random edge because the source had no
    /// other out-link.
    pub fallback_removals: usize,
    pub skipped_nodes: usize,
    pub metrics: MetricsSnapshot,
}

impl StepRecord {
    pub fn baseline(g: &DirectedGraph) -> Result<Self> {
        Ok(StepRecord {
            step: 0,
            edges_added: 0,
            edges_removed: 0,
            fallback_removals: 0,
            skipped_nodes: 0,
            metrics: MetricsSnapshot::compute(&g.snapshot())?,
        })
    }
}

/// Top-k picks for the nodes in `order`, indexed by node id. The result does
/// not depend on `order`: each node draws ties from its own stream.
pub fn recommendations(
    snap: &Snapshot,
    rec: &dyn Recommender,
    ctx: StepContext,
    policy: ZeroScorePolicy,
    order: &[NodeId],
) -> Result<Vec<Option<NodeId>>> {
    let picks: Vec<(NodeId, Option<NodeId>)> = order
        .par_iter()
        .map(|&i| {
            let sv = rec.scores(snap, i)?;
            let mut rng = stream(ctx.seed, Purpose::TieBreak, &[ctx.step as u64, i as u64]);
            Ok((i, top_k(&sv, 1, policy, &mut rng).first().copied()))
        })
        .collect::<Result<_>>()?;
    let mut out = vec![None; snap.node_count()];
    for (i, pick) in picks {
        out[i] = pick;
    }
    Ok(out)
}

/// Apply one step to `g`; `step_index` starts at 1.
pub fn step(
    g: &mut DirectedGraph,
    rec: &mut dyn Recommender,
    seed: u64,
    step_index: usize,
    policy: ZeroScorePolicy,
) -> Result<StepRecord> {
    let snap = g.snapshot();
    let ctx = StepContext { seed, step: step_index };
    rec.prepare(&snap, ctx)?;
    let order: Vec<NodeId> = (0..snap.node_count()).collect();
    let picks = recommendations(&snap, rec, ctx, policy, &order)?;
    drop(snap);

    let (mut added, mut removed, mut fallbacks, mut skipped) = (0, 0, 0, 0);
    for (i, pick) in picks.into_iter().enumerate() {
        let Some(j) = pick else {
            skipped += 1;
            continue;
        };
        if !g.add_edge(i, j)? {
            continue;
        }
        added += 1;
        let mut rng = stream(seed, Purpose::Removal, &[step_index as u64, i as u64]);
        let victim = match g.random_out_neighbor(i, Some(j), &mut rng) {
            Some(x) => Some((i, x)),
            None => {
                fallbacks += 1;
                g.random_edge(Some((i, j)), &mut rng)
            }
        };
        if let Some((a, b)) = victim {
            g.remove_edge(a, b)?;
            removed += 1;
        }
    }
    Ok(StepRecord {
        step: step_index,
        edges_added: added,
        edges_removed: removed,
        fallback_removals: fallbacks,
        skipped_nodes: skipped,
        metrics: MetricsSnapshot::compute(&g.snapshot())?,
    })
}

/// Step-0 baseline followed by `steps` feedback-loop steps.
pub fn run_with(
    g: &mut DirectedGraph,
    rec: &mut dyn Recommender,
    steps: usize,
    seed: u64,
    policy: ZeroScorePolicy,
) -> Result<Vec<StepRecord>> {
    let mut records = Vec::with_capacity(steps + 1);
    records.push(StepRecord::baseline(g)?);
    for s in 1..=steps {
        records.push(step(g, rec, seed, s, policy)?);
    }
    Ok(records)
}

pub fn run(g: &mut DirectedGraph, cfg: &SimulationConfig) -> Result<Vec<StepRecord>> {
    cfg.validate()?;
    let mut rec = cfg.recommender.build()?;
    run_with(g, rec.as_mut(), cfg.steps, cfg.seed, cfg.zero_scores)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::prefix_labels;
    use crate::recommenders::ScoreVector;

    struct Fixed(Vec<Option<NodeId>>);

    impl Recommender for Fixed {
        fn name(&self) -> &str {
            "fixed"
        }

        fn scores(&self, snap: &Snapshot, seed: NodeId) -> Result<ScoreVector> {
            Ok(match self.0[seed] {
                Some(t) => ScoreVector::from_fn(snap, seed, |j| if j == t { 1.0 } else { 0.0 }),
                None => ScoreVector::empty(seed),
            })
        }
    }

    #[test]
    fn sourceless_addition_falls_back_elsewhere() {
        // Node 0 has no out-links and is recommended node 3.
        let mut g = DirectedGraph::from_edges(prefix_labels(4, 0.0), [(1, 2), (2, 1)]).unwrap();
        let mut rec = Fixed(vec![Some(3), None, None, None]);
        let r = step(&mut g, &mut rec, 1, 1, ZeroScorePolicy::Exclude).unwrap();
        assert_eq!((r.edges_added, r.edges_removed, r.fallback_removals, r.skipped_nodes), (1, 1, 1, 3));
        assert_eq!(g.edge_count(), 2);
        assert!(g.has_edge(0, 3));
    }

    #[test]
    fn own_out_link_is_removed() {
        let mut g = DirectedGraph::from_edges(prefix_labels(4, 0.0), [(0, 1), (2, 3)]).unwrap();
        let mut rec = Fixed(vec![Some(2), None, None, None]);
        let r = step(&mut g, &mut rec, 9, 1, ZeroScorePolicy::Exclude).unwrap();
        assert_eq!(r.fallback_removals, 0);
        assert_eq!(g.sorted_edges(), vec![(0, 2), (2, 3)]);
    }

    #[test]
    fn saturated_node_is_skipped() {
        let mut g = DirectedGraph::from_edges(prefix_labels(3, 0.0), [(0, 1), (0, 2), (1, 2)]).unwrap();
        let mut rec = crate::recommenders::TwoHops;
        let r = step(&mut g, &mut rec, 0, 1, ZeroScorePolicy::Exclude).unwrap();
        // 0 follows everyone; 1 can reach nobody new in two hops; 2 has no out-links.
        assert_eq!(r.skipped_nodes, 3);
        assert_eq!(r.edges_added, 0);
    }

    #[test]
    fn zero_steps_is_baseline_only() {
        let mut g = DirectedGraph::from_edges(prefix_labels(3, 0.0), [(0, 1), (1, 2)]).unwrap();
        let before = g.clone();
        let cfg = SimulationConfig {
            steps: 0,
            ..SimulationConfig::new(RecommenderKind::TwoHops, 3)
        };
        let recs = run(&mut g, &cfg).unwrap();
        assert_eq!(recs.len(), 1);
        assert_eq!(recs[0].step, 0);
        assert_eq!(g, before);
    }

    #[test]
    fn k_other_than_one_is_rejected() {
        let mut g = DirectedGraph::with_minority_fraction(3, 0.0);
        let cfg = SimulationConfig {
            k: 2,
            ..SimulationConfig::new(RecommenderKind::TwoHops, 3)
        };
        assert!(run(&mut g, &cfg).is_err());
    }
}
