use super::{Recommender, ScoreVector};
use crate::error::Result;
use crate::graph::{NodeId, Snapshot};
use crate::pagerank::{personalized_pagerank, DEFAULT_TOL};

/// PPR from `seed` restricted to its candidates.
pub fn ppr_scores(snap: &Snapshot, seed: NodeId, alpha: f64, tol: f64) -> Result<ScoreVector> {
    let pi = personalized_pagerank(snap, seed, alpha, tol)?;
    Ok(ScoreVector::from_fn(snap, seed, |j| pi[j]))
}

#[derive(Debug, Clone)]
pub struct PersonalizedPageRank {
    pub alpha: f64,
    pub tol: f64,
}

impl PersonalizedPageRank {
    pub fn new(alpha: f64) -> Self {
        PersonalizedPageRank { alpha, tol: DEFAULT_TOL }
    }
}

impl Recommender for PersonalizedPageRank {
    fn name(&self) -> &str {
        "ppr"
    }

    fn scores(&self, snap: &Snapshot, seed: NodeId) -> Result<ScoreVector> {
        ppr_scores(snap, seed, self.alpha, self.tol)
    }
}
