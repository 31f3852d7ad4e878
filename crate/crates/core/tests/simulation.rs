mod common;

use linkloop::dpah::{generate, DpahParams};
use linkloop::embedding::N2VParams;
use linkloop::recommenders::{Recommender, RecommenderKind, ScoreVector, StepContext, ZeroScorePolicy};
use linkloop::simulation::{recommendations, run, run_with, SimulationConfig};
use linkloop::{DirectedGraph, NodeId, Result, Snapshot};
use rand::seq::SliceRandom;

fn network(n: usize, seed: u64) -> DirectedGraph {
    generate(&DpahParams {
        n,
        seed,
        ..DpahParams::default()
    })
    .unwrap()
}

fn small_n2v() -> RecommenderKind {
    RecommenderKind::N2v(N2VParams {
        dimensions: 16,
        num_walks: 10,
        ..N2VParams::default()
    })
}

fn assert_simple(g: &DirectedGraph) {
    let mut edges = g.sorted_edges();
    let before = edges.len();
    edges.dedup();
    assert_eq!(edges.len(), before);
    assert!(edges.iter().all(|(i, j)| i != j));
}

#[test]
fn edge_count_is_conserved() {
    let base = network(120, 1);
    let e = base.edge_count();
    let mut kinds: Vec<RecommenderKind> = ["ppr", "wtf", "2h", "cf"].iter().map(|k| k.parse().unwrap()).collect();
    kinds.push(small_n2v());
    for kind in kinds {
        let mut g = base.clone();
        let mut cfg = SimulationConfig::new(kind.clone(), 5);
        cfg.steps = 5;
        let recs = run(&mut g, &cfg).unwrap();
        assert_eq!(recs.len(), 6);
        assert_eq!(g.edge_count(), e, "{}", kind.name());
        for r in &recs[1..] {
            assert_eq!(r.edges_added, r.edges_removed, "{}", kind.name());
            assert_eq!(r.edges_added + r.skipped_nodes, g.node_count());
        }
        assert_simple(&g);
    }
}

#[test]
fn same_seed_same_records() {
    for kind in ["wtf", "cf"] {
        let cfg = SimulationConfig {
            steps: 4,
            ..SimulationConfig::new(kind.parse().unwrap(), 9)
        };
        let (mut a, mut b) = (network(100, 2), network(100, 2));
        assert_eq!(run(&mut a, &cfg).unwrap(), run(&mut b, &cfg).unwrap());
        assert_eq!(a, b);
    }
    let cfg = SimulationConfig {
        steps: 2,
        ..SimulationConfig::new(small_n2v(), 9)
    };
    let (mut a, mut b) = (network(60, 2), network(60, 2));
    assert_eq!(run(&mut a, &cfg).unwrap(), run(&mut b, &cfg).unwrap());
}

struct Silent;

impl Recommender for Silent {
    fn name(&self) -> &str {
        "silent"
    }

    fn scores(&self, _: &Snapshot, seed: NodeId) -> Result<ScoreVector> {
        Ok(ScoreVector::empty(seed))
    }
}

#[test]
fn empty_recommender_is_identity() {
    let mut g = network(100, 3);
    let before = g.clone();
    let recs = run_with(&mut g, &mut Silent, 5, 1, ZeroScorePolicy::Exclude).unwrap();
    assert_eq!(g, before);
    assert!(recs[1..].iter().all(|r| r.skipped_nodes == 100 && r.edges_added == 0));
    assert!(recs.windows(2).all(|w| w[0].metrics == w[1].metrics));
}

#[test]
fn evaluation_order_does_not_matter() {
    let g = network(150, 4);
    let s = g.snapshot();
    let ctx = StepContext { seed: 3, step: 1 };
    for kind in ["ppr", "2h", "cf"] {
        let rec = kind.parse::<RecommenderKind>().unwrap().build().unwrap();
        let mut order: Vec<NodeId> = (0..150).collect();
        let forward = recommendations(&s, rec.as_ref(), ctx, ZeroScorePolicy::Exclude, &order).unwrap();
        order.shuffle(&mut linkloop::rng::stream(1, linkloop::rng::Purpose::Sweep, &[]));
        let shuffled = recommendations(&s, rec.as_ref(), ctx, ZeroScorePolicy::Exclude, &order).unwrap();
        assert_eq!(forward, shuffled, "{kind}");
    }
}

#[test]
fn recommendations_are_valid_candidates() {
    let g = network(150, 5);
    let s = g.snapshot();
    let ctx = StepContext { seed: 2, step: 1 };
    for kind in RecommenderKind::NAMES {
        let kind: RecommenderKind = if kind == "n2v" { small_n2v() } else { kind.parse().unwrap() };
        let mut rec = kind.build().unwrap();
        rec.prepare(&s, ctx).unwrap();
        let order: Vec<NodeId> = (0..150).collect();
        for (i, pick) in recommendations(&s, rec.as_ref(), ctx, ZeroScorePolicy::Exclude, &order)
            .unwrap()
            .into_iter()
            .enumerate()
        {
            if let Some(j) = pick {
                assert!(j != i && !s.has_edge(i, j), "{} picked {i}->{j}", kind.name());
            }
        }
    }
}
