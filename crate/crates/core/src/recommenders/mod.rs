//! Topology-only link recommenders.
//!
//! Each recommender maps a frozen [`Snapshot`] and a seed node to a
//! [`ScoreVector`] over the seed's candidates (every node it does not follow,
//! itself excluded). [`top_k`] turns scores into a ranked list with uniform
//! random tie-breaking.

mod neighborhood;
mod node2vec;
mod ppr;
mod wtf;

pub use neighborhood::{common_followed_scores, two_hops_scores, CommonFollowed, TwoHops};
pub use node2vec::{node2vec_scores, Node2Vec};
pub use ppr::{ppr_scores, PersonalizedPageRank};
pub use wtf::{circle_of_trust, salsa_authorities, wtf_scores, WhoToFollow};

use std::fmt;
use std::str::FromStr;

use rand::seq::SliceRandom;
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::embedding::N2VParams;
use crate::error::{Error, Result};
use crate::graph::{NodeId, Snapshot};
use crate::pagerank::DEFAULT_ALPHA;

pub const DEFAULT_COT_SIZE: usize = 10;

/// Relevance scores for the candidates of one seed node, ascending by node id.
#[derive(Debug, Clone, PartialEq)]
pub struct ScoreVector {
    seed: NodeId,
    entries: Vec<(NodeId, f64)>,
}

impl ScoreVector {
    pub fn new(seed: NodeId, entries: Vec<(NodeId, f64)>) -> Self {
        debug_assert!(entries.iter().all(|&(j, s)| j != seed && s.is_finite() && s >= 0.0));
        ScoreVector { seed, entries }
    }

    pub fn empty(seed: NodeId) -> Self {
        ScoreVector {
            seed,
            entries: Vec::new(),
        }
    }

    /// Scores every candidate of `seed` in `snap` with `f`.
    pub fn from_fn(snap: &Snapshot, seed: NodeId, mut f: impl FnMut(NodeId) -> f64) -> Self {
        let entries = snap.candidates(seed).into_iter().map(|j| (j, f(j))).collect();
        Self::new(seed, entries)
    }

    pub fn seed(&self) -> NodeId {
        self.seed
    }

    pub fn entries(&self) -> &[(NodeId, f64)] {
        &self.entries
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn score(&self, node: NodeId) -> Option<f64> {
        self.entries
            .binary_search_by_key(&node, |&(j, _)| j)
            .ok()
            .map(|k| self.entries[k].1)
    }
}

/// What to do with candidates that score exactly zero.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
pub enum ZeroScorePolicy {
    /// Zero evidence never yields a recommendation.
    #[default]
    Exclude,
    Include,
}

/// The `k` best candidates, descending; tied blocks are randomly permuted.
pub fn top_k<R: Rng + ?Sized>(sv: &ScoreVector, k: usize, policy: ZeroScorePolicy, rng: &mut R) -> Vec<NodeId> {
    let keep = |s: f64| policy == ZeroScorePolicy::Include || s > 0.0;
    if k == 0 {
        return Vec::new();
    }
    if k == 1 {
        let best = sv
            .entries
            .iter()
            .filter(|e| keep(e.1))
            .map(|e| e.1)
            .fold(f64::NEG_INFINITY, f64::max);
        let tied: Vec<NodeId> = sv.entries.iter().filter(|e| keep(e.1) && e.1 == best).map(|e| e.0).collect();
        return match tied.len() {
            0 => Vec::new(),
            1 => tied,
            t => vec![tied[rng.random_range(0..t)]],
        };
    }
    let mut ranked: Vec<(NodeId, f64)> = sv.entries.iter().copied().filter(|e| keep(e.1)).collect();
    ranked.sort_by(|a, b| b.1.total_cmp(&a.1).then(a.0.cmp(&b.0)));
    let mut start = 0;
    while start < ranked.len() && start < k {
        let score = ranked[start].1;
        let end = start + ranked[start..].iter().take_while(|e| e.1 == score).count();
        ranked[start..end].shuffle(rng);
        start = end;
    }
    ranked.into_iter().take(k).map(|e| e.0).collect()
}

/// Per-step context handed to [`Recommender::prepare`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct StepContext {
    pub seed: u64,
    pub step: usize,
}

pub trait Recommender: Send + Sync {
    fn name(&self) -> &str;

    /// Called once per step on the frozen snapshot before any scoring.
    fn prepare(&mut self, _snap: &Snapshot, _ctx: StepContext) -> Result<()> {
        Ok(())
    }

    fn scores(&self, snap: &Snapshot, seed: NodeId) -> Result<ScoreVector>;
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum RecommenderKind {
    Ppr { alpha: f64 },
    Wtf { alpha: f64, cot_size: usize },
    #[serde(rename = "2h")]
    TwoHops,
    Cf,
    N2v(N2VParams),
}

impl RecommenderKind {
    pub const NAMES: [&'static str; 5] = ["ppr", "wtf", "2h", "cf", "n2v"];

    pub fn name(&self) -> &'static str {
        match self {
            RecommenderKind::Ppr { .. } => "ppr",
            RecommenderKind::Wtf { .. } => "wtf",
            RecommenderKind::TwoHops => "2h",
            RecommenderKind::Cf => "cf",
            RecommenderKind::N2v(_) => "n2v",
        }
    }

    pub fn all() -> Vec<RecommenderKind> {
        Self::NAMES.iter().map(|n| n.parse().unwrap()).collect()
    }

    pub fn validate(&self) -> Result<()> {
        match self {
            RecommenderKind::Ppr { alpha } | RecommenderKind::Wtf { alpha, .. } if !(*alpha > 0.0 && *alpha < 1.0) => {
                Err(Error::InvalidArgument(format!("alpha must lie in (0, 1), got {alpha}")))
            }
            RecommenderKind::Wtf { cot_size: 0, .. } => {
                Err(Error::InvalidArgument("circle-of-trust size must be at least 1".into()))
            }
            RecommenderKind::N2v(p) => p.validate(),
            _ => Ok(()),
        }
    }

    pub fn build(&self) -> Result<Box<dyn Recommender>> {
        self.validate()?;
        Ok(match self {
            RecommenderKind::Ppr { alpha } => Box::new(PersonalizedPageRank::new(*alpha)),
            RecommenderKind::Wtf { alpha, cot_size } => Box::new(WhoToFollow::new(*alpha, *cot_size)),
            RecommenderKind::TwoHops => Box::new(TwoHops),
            RecommenderKind::Cf => Box::new(CommonFollowed),
            RecommenderKind::N2v(p) => Box::new(Node2Vec::new(p.clone())),
        })
    }
}

impl fmt::Display for RecommenderKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for RecommenderKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "ppr" => Ok(RecommenderKind::Ppr { alpha: DEFAULT_ALPHA }),
            "wtf" => Ok(RecommenderKind::Wtf {
                alpha: DEFAULT_ALPHA,
                cot_size: DEFAULT_COT_SIZE,
            }),
            "2h" | "twohops" | "two-hops" => Ok(RecommenderKind::TwoHops),
            "cf" | "common-followed" => Ok(RecommenderKind::Cf),
            "n2v" | "node2vec" => Ok(RecommenderKind::N2v(N2VParams::default())),
            other => Err(Error::InvalidArgument(format!(
                "unknown recommender {other:?}; valid names: {}",
                Self::NAMES.join(", ")
            ))),
        }
    }
}
