use log::warn;

use super::{Recommender, ScoreVector, StepContext};
use crate::embedding::{embed, EmbeddingMatrix, N2VParams};
use crate::error::{Error, Result};
use crate::graph::{NodeId, Snapshot};
use crate::rng::{derive_seed, Purpose};

/// Cosine similarity to the seed, shifted by +1 so scores are non-negative.
/// Zero-norm vectors are dropped from the candidates.
pub fn node2vec_scores(emb: &EmbeddingMatrix, seed: NodeId, candidates: &[NodeId]) -> ScoreVector {
    let seed_norm = emb.norm(seed);
    if seed_norm == 0.0 {
        warn!("node {seed} has a zero-norm embedding; no candidates scored");
        return ScoreVector::empty(seed);
    }
    let v = emb.row(seed);
    let mut dropped = 0usize;
    let entries = candidates
        .iter()
        .filter_map(|&j| {
            let norm = emb.norm(j);
            if norm == 0.0 {
                dropped += 1;
                return None;
            }
            let dot: f64 = v.iter().zip(emb.row(j)).map(|(&a, &b)| f64::from(a) * f64::from(b)).sum();
            let cos = (dot / (seed_norm * norm)).clamp(-1.0, 1.0);
            Some((j, cos + 1.0))
        })
        .collect();
    if dropped > 0 {
        warn!("{dropped} zero-norm candidates dropped for seed {seed}");
    }
    ScoreVector::new(seed, entries)
}

/// Retrains embeddings from scratch on every step's snapshot.
#[derive(Debug, Clone)]
pub struct Node2Vec {
    params: N2VParams,
    embedding: Option<EmbeddingMatrix>,
}

impl Node2Vec {
    pub fn new(params: N2VParams) -> Self {
        Node2Vec {
            params,
            embedding: None,
        }
    }

    pub fn embedding(&self) -> Option<&EmbeddingMatrix> {
        self.embedding.as_ref()
    }
}

impl Recommender for Node2Vec {
    fn name(&self) -> &str {
        "n2v"
    }

    fn prepare(&mut self, snap: &Snapshot, ctx: StepContext) -> Result<()> {
        let params = N2VParams {
            seed: derive_seed(ctx.seed ^ self.params.seed, Purpose::Training, &[ctx.step as u64]),
            ..self.params.clone()
        };
        self.embedding = Some(embed(snap, &params)?);
        Ok(())
    }

    fn scores(&self, snap: &Snapshot, seed: NodeId) -> Result<ScoreVector> {
        let emb = self
            .embedding
            .as_ref()
            .ok_or_else(|| Error::InvalidArgument("node2vec scores requested before prepare()".into()))?;
        Ok(node2vec_scores(emb, seed, &snap.candidates(seed)))
    }
}
