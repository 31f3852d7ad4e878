//! Node2Vec-style embeddings for directed graphs.
//!
//! Second-order biased walks follow out-edges only and stop at sinks. The walk
//! corpus trains a skip-gram model with negative sampling (unigram^0.75 noise,
//! reduced random windows, linearly decayed learning rate). Training is
//! single-threaded so a seed fixes the result bit for bit.

use std::io::{Read, Write};
use std::path::Path;

use rand::distr::Distribution;
use rand::seq::SliceRandom;
use rand::Rng;
use rand_distr::weighted::WeightedAliasIndex;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::{NodeId, Snapshot};
use crate::rng::{stream, Purpose, SimRng};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct N2VParams {
    pub dimensions: usize,
    pub walk_length: usize,
    pub num_walks: usize,
    pub window: usize,
    pub negative_samples: usize,
    pub epochs: usize,
    pub learning_rate: f64,
    pub min_learning_rate: f64,
    pub p: f64,
    pub q: f64,
    pub seed: u64,
}

impl Default for N2VParams {
    fn default() -> Self {
        N2VParams {
            dimensions: 64,
            walk_length: 10,
            num_walks: 200,
            window: 10,
            negative_samples: 5,
            epochs: 1,
            learning_rate: 0.025,
            min_learning_rate: 1e-4,
            p: 1.0,
            q: 1.0,
            seed: 0,
        }
    }
}

impl N2VParams {
    pub fn validate(&self) -> Result<()> {
        let bad = |m: &str| Err(Error::InvalidArgument(format!("node2vec: {m}")));
        if self.dimensions == 0 {
            return bad("dimensions must be positive");
        }
        if self.walk_length == 0 || self.num_walks == 0 {
            return bad("walk_length and num_walks must be positive");
        }
        if self.window == 0 {
            return bad("window must be positive");
        }
        if !(self.p > 0.0 && self.q > 0.0) {
            return bad("p and q must be positive");
        }
        if !(self.learning_rate > 0.0 && self.min_learning_rate >= 0.0) {
            return bad("learning rates must be positive");
        }
        Ok(())
    }
}

/// Walks stored back to back; walk `k` is `tokens[offsets[k]..offsets[k + 1]]`.
#[derive(Debug, Clone, PartialEq)]
pub struct WalkCorpus {
    node_count: usize,
    tokens: Vec<u32>,
    offsets: Vec<usize>,
}

impl WalkCorpus {
    pub fn from_walks(node_count: usize, walks: impl IntoIterator<Item = Vec<NodeId>>) -> Self {
        let mut tokens = Vec::new();
        let mut offsets = vec![0];
        for w in walks {
            tokens.extend(w.iter().map(|&v| v as u32));
            offsets.push(tokens.len());
        }
        WalkCorpus {
            node_count,
            tokens,
            offsets,
        }
    }

    pub fn node_count(&self) -> usize {
        self.node_count
    }

    pub fn len(&self) -> usize {
        self.offsets.len() - 1
    }

    pub fn is_empty(&self) -> bool {
        self.tokens.is_empty()
    }

    pub fn token_count(&self) -> usize {
        self.tokens.len()
    }

    pub fn walk(&self, k: usize) -> &[u32] {
        &self.tokens[self.offsets[k]..self.offsets[k + 1]]
    }

    pub fn walks(&self) -> impl Iterator<Item = &[u32]> {
        self.offsets.windows(2).map(|w| &self.tokens[w[0]..w[1]])
    }

    pub fn frequencies(&self) -> Vec<u64> {
        let mut f = vec![0u64; self.node_count];
        for &t in &self.tokens {
            f[t as usize] += 1;
        }
        f
    }
}

/// One biased walk of at most `params.walk_length` nodes from `start`.
pub fn biased_walk<R: Rng + ?Sized>(snap: &Snapshot, start: NodeId, params: &N2VParams, rng: &mut R) -> Vec<NodeId> {
    let mut walk = Vec::with_capacity(params.walk_length);
    walk.push(start);
    let unbiased = params.p == 1.0 && params.q == 1.0;
    let mut weights = Vec::new();
    while walk.len() < params.walk_length {
        let cur = *walk.last().unwrap();
        let out = snap.out(cur);
        if out.is_empty() {
            break;
        }
        let next = if walk.len() == 1 || unbiased {
            out[rng.random_range(0..out.len())] as NodeId
        } else {
            let prev = walk[walk.len() - 2];
            weights.clear();
            weights.extend(out.iter().map(|&x| {
                let x = x as NodeId;
                if x == prev {
                    1.0 / params.p
                } else if snap.has_edge(prev, x) {
                    1.0
                } else {
                    1.0 / params.q
                }
            }));
            let total: f64 = weights.iter().sum();
            let r = rng.random::<f64>() * total;
            let mut acc = 0.0;
            let mut pick = out.len() - 1;
            for (k, w) in weights.iter().enumerate() {
                acc += w;
                if acc > r {
                    pick = k;
                    break;
                }
            }
            out[pick] as NodeId
        };
        walk.push(next);
    }
    walk
}

/// `num_walks` walks per node. Each start node owns an RNG stream; the corpus
/// is ordered round by round with a seeded shuffle of start nodes per round.
pub fn generate_walks(snap: &Snapshot, params: &N2VParams) -> WalkCorpus {
    let n = snap.node_count();
    let per_node: Vec<Vec<Vec<NodeId>>> = (0..n)
        .into_par_iter()
        .map(|v| {
            let mut rng = stream(params.seed, Purpose::Walks, &[v as u64]);
            (0..params.num_walks).map(|_| biased_walk(snap, v, params, &mut rng)).collect()
        })
        .collect();
    let mut order: Vec<NodeId> = (0..n).collect();
    let mut walks = Vec::with_capacity(n * params.num_walks);
    let mut per_node: Vec<std::vec::IntoIter<Vec<NodeId>>> = per_node.into_iter().map(Vec::into_iter).collect();
    for round in 0..params.num_walks {
        let mut rng = stream(params.seed, Purpose::WalkOrder, &[round as u64]);
        order.shuffle(&mut rng);
        for &v in &order {
            walks.push(per_node[v].next().expect("num_walks walks per node"));
        }
    }
    WalkCorpus::from_walks(n, walks)
}

/// Row-major `n x dimensions` matrix of node vectors.
#[derive(Debug, Clone, PartialEq)]
pub struct EmbeddingMatrix {
    n: usize,
    dim: usize,
    data: Vec<f32>,
}

impl EmbeddingMatrix {
    pub fn from_rows(rows: &[Vec<f32>]) -> Self {
        let dim = rows.first().map_or(0, Vec::len);
        assert!(rows.iter().all(|r| r.len() == dim), "ragged embedding rows");
        EmbeddingMatrix {
            n: rows.len(),
            dim,
            data: rows.concat(),
        }
    }

    pub fn node_count(&self) -> usize {
        self.n
    }

    pub fn dimensions(&self) -> usize {
        self.dim
    }

    pub fn row(&self, i: NodeId) -> &[f32] {
        &self.data[i * self.dim..(i + 1) * self.dim]
    }

    pub fn norm(&self, i: NodeId) -> f64 {
        self.row(i).iter().map(|&x| f64::from(x) * f64::from(x)).sum::<f64>().sqrt()
    }

    pub fn is_finite(&self) -> bool {
        self.data.iter().all(|x| x.is_finite())
    }

    /// Debug dump: `n` and `dimensions` as little-endian u64, then f64 entries.
    pub fn write_binary(&self, path: impl AsRef<Path>) -> Result<()> {
        let path = path.as_ref();
        let mut buf = Vec::with_capacity(16 + 8 * self.data.len());
        buf.write_all(&(self.n as u64).to_le_bytes()).unwrap();
        buf.write_all(&(self.dim as u64).to_le_bytes()).unwrap();
        for &x in &self.data {
            buf.write_all(&f64::from(x).to_le_bytes()).unwrap();
        }
        std::fs::write(path, buf).map_err(|e| Error::io(path, e))
    }

    pub fn read_binary(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let mut bytes = Vec::new();
        std::fs::File::open(path)
            .and_then(|mut f| f.read_to_end(&mut bytes))
            .map_err(|e| Error::io(path, e))?;
        let word = |k: usize| -> Option<[u8; 8]> { bytes.get(8 * k..8 * k + 8).map(|s| s.try_into().unwrap()) };
        let bad = || Error::Parse {
            path: path.to_path_buf(),
            line: 0,
            msg: "truncated embedding dump".into(),
        };
        let n = u64::from_le_bytes(word(0).ok_or_else(bad)?) as usize;
        let dim = u64::from_le_bytes(word(1).ok_or_else(bad)?) as usize;
        if bytes.len() != 16 + 8 * n * dim {
            return Err(bad());
        }
        let data = (0..n * dim).map(|k| f64::from_le_bytes(word(k + 2).unwrap()) as f32).collect();
        Ok(EmbeddingMatrix { n, dim, data })
    }
}

#[inline]
fn dot(a: &[f32], b: &[f32]) -> f32 {
    let mut acc = [0.0f32; 8];
    let (ca, cb) = (a.chunks_exact(8), b.chunks_exact(8));
    let (ra, rb) = (ca.remainder(), cb.remainder());
    for (x, y) in ca.zip(cb) {
        for k in 0..8 {
            acc[k] += x[k] * y[k];
        }
    }
    let tail: f32 = ra.iter().zip(rb).map(|(x, y)| x * y).sum();
    acc.iter().sum::<f32>() + tail
}

#[inline]
fn axpy(alpha: f32, x: &[f32], y: &mut [f32]) {
    for (yv, &xv) in y.iter_mut().zip(x) {
        *yv += alpha * xv;
    }
}

#[inline]
fn sigmoid(x: f64) -> f64 {
    1.0 / (1.0 + (-x).exp())
}

/// Skip-gram with negative sampling, trainable one epoch at a time.
#[derive(Debug, Clone)]
pub struct SkipGram {
    params: N2VParams,
    n: usize,
    dim: usize,
    input: Vec<f32>,
    output: Vec<f32>,
    noise: Option<WeightedAliasIndex<f64>>,
    noise_probs: Vec<f64>,
    rng: SimRng,
    epochs_done: usize,
}

impl SkipGram {
    pub fn new(corpus: &WalkCorpus, params: &N2VParams) -> Result<Self> {
        params.validate()?;
        if corpus.is_empty() {
            return Err(Error::InvalidArgument("empty walk corpus".into()));
        }
        let (n, dim) = (corpus.node_count(), params.dimensions);
        let mut init = stream(params.seed, Purpose::EmbeddingInit, &[]);
        let half = 0.5 / dim as f32;
        let input = (0..n * dim).map(|_| init.random_range(-half..half)).collect();
        let noise_w: Vec<f64> = corpus.frequencies().iter().map(|&f| (f as f64).powf(0.75)).collect();
        let total: f64 = noise_w.iter().sum();
        let noise_probs = noise_w.iter().map(|w| w / total).collect();
        let noise = WeightedAliasIndex::new(noise_w)
            .map_err(|e| Error::InvalidArgument(format!("noise distribution: {e}")))?;
        Ok(SkipGram {
            rng: stream(params.seed, Purpose::Training, &[]),
            params: params.clone(),
            n,
            dim,
            input,
            output: vec![0.0; n * dim],
            noise: Some(noise),
            noise_probs,
            epochs_done: 0,
        })
    }

    fn learning_rate(&self, processed: usize, total: usize) -> f32 {
        let lr0 = self.params.learning_rate;
        let progress = processed as f64 / total.max(1) as f64;
        (lr0 - (lr0 - self.params.min_learning_rate) * progress).max(self.params.min_learning_rate) as f32
    }

    /// One pass over the corpus; the learning rate decays across all
    /// `params.epochs` epochs.
    pub fn train_epoch(&mut self, corpus: &WalkCorpus) {
        let total = corpus.token_count() * self.params.epochs.max(1);
        let mut processed = corpus.token_count() * self.epochs_done;
        let dim = self.dim;
        let mut grad = vec![0.0f32; dim];
        let noise = self.noise.take().expect("noise table");
        for walk in corpus.walks() {
            for (pos, &center) in walk.iter().enumerate() {
                let lr = self.learning_rate(processed, total);
                processed += 1;
                let reduce = self.rng.random_range(0..self.params.window);
                let span = self.params.window - reduce;
                let lo = pos.saturating_sub(span);
                let hi = (pos + span + 1).min(walk.len());
                for (ctx_pos, &context) in walk.iter().enumerate().take(hi).skip(lo) {
                    if ctx_pos == pos {
                        continue;
                    }
                    let c = context as usize * dim;
                    grad.iter_mut().for_each(|g| *g = 0.0);
                    for d in 0..=self.params.negative_samples {
                        let (target, label) = if d == 0 {
                            (center as usize, 1.0f32)
                        } else {
                            let t = noise.sample(&mut self.rng);
                            if t == center as usize {
                                continue;
                            }
                            (t, 0.0)
                        };
                        let o = target * dim;
                        let f = dot(&self.input[c..c + dim], &self.output[o..o + dim]);
                        let g = (label - sigmoid(f64::from(f)) as f32) * lr;
                        axpy(g, &self.output[o..o + dim], &mut grad);
                        axpy(g, &self.input[c..c + dim], &mut self.output[o..o + dim]);
                    }
                    axpy(1.0, &grad, &mut self.input[c..c + dim]);
                }
            }
        }
        self.noise = Some(noise);
        self.epochs_done += 1;
    }

    /// Negative-sampling objective with every in-window pair counted once and
    /// the noise term taken in expectation.
    pub fn loss(&self, corpus: &WalkCorpus) -> f64 {
        let dim = self.dim;
        let k = self.params.negative_samples as f64;
        let mut loss = 0.0;
        let mut pairs = 0usize;
        for walk in corpus.walks() {
            for (pos, &center) in walk.iter().enumerate() {
                let lo = pos.saturating_sub(self.params.window);
                let hi = (pos + self.params.window + 1).min(walk.len());
                for (ctx_pos, &context) in walk.iter().enumerate().take(hi).skip(lo) {
                    if ctx_pos == pos {
                        continue;
                    }
                    let c = &self.input[context as usize * dim..(context as usize + 1) * dim];
                    let pos_f = f64::from(dot(c, &self.output[center as usize * dim..(center as usize + 1) * dim]));
                    let mut term = -sigmoid(pos_f).ln();
                    for (t, &p) in self.noise_probs.iter().enumerate() {
                        if p > 0.0 {
                            let f = f64::from(dot(c, &self.output[t * dim..(t + 1) * dim]));
                            term -= k * p * sigmoid(-f).ln();
                        }
                    }
                    loss += term;
                    pairs += 1;
                }
            }
        }
        loss / pairs.max(1) as f64
    }

    pub fn embedding(&self) -> EmbeddingMatrix {
        EmbeddingMatrix {
            n: self.n,
            dim: self.dim,
            data: self.input.clone(),
        }
    }

    pub fn into_embedding(self) -> EmbeddingMatrix {
        EmbeddingMatrix {
            n: self.n,
            dim: self.dim,
            data: self.input,
        }
    }
}

pub fn train_skipgram(corpus: &WalkCorpus, params: &N2VParams) -> Result<EmbeddingMatrix> {
    let mut model = SkipGram::new(corpus, params)?;
    for _ in 0..params.epochs {
        model.train_epoch(corpus);
    }
    Ok(model.into_embedding())
}

/// Walks plus training in one call.
pub fn embed(snap: &Snapshot, params: &N2VParams) -> Result<EmbeddingMatrix> {
    params.validate()?;
    let corpus = generate_walks(snap, params);
    train_skipgram(&corpus, params)
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

    fn small_params() -> N2VParams {
        N2VParams {
            dimensions: 16,
            num_walks: 20,
            ..N2VParams::default()
        }
    }

    #[test]
    fn isolated_node_walks_have_length_one() {
        let c = generate_walks(&snap(1, &[]), &small_params());
        assert_eq!(c.len(), 20);
        assert!(c.walks().all(|w| w == [0]));
    }

    #[test]
    fn path_walks_stop_at_sink() {
        let c = generate_walks(&snap(3, &[(0, 1), (1, 2)]), &small_params());
        assert!(c.walks().filter(|w| w[0] == 0).all(|w| w == [0, 1, 2]));
        assert!(c.walks().filter(|w| w[0] == 2).all(|w| w == [2]));
    }

    #[test]
    fn two_cycle_walks_alternate() {
        let p = N2VParams {
            walk_length: 4,
            p: 0.5,
            q: 2.0,
            ..small_params()
        };
        let c = generate_walks(&snap(2, &[(0, 1), (1, 0)]), &p);
        assert!(c.walks().filter(|w| w[0] == 0).all(|w| w == [0, 1, 0, 1]));
    }

    #[test]
    fn zero_epochs_keep_initialization() {
        let s = snap(3, &[(0, 1), (1, 2), (2, 0)]);
        let p = N2VParams { epochs: 0, ..small_params() };
        let corpus = generate_walks(&s, &p);
        let untouched = SkipGram::new(&corpus, &p).unwrap().embedding();
        assert_eq!(train_skipgram(&corpus, &p).unwrap(), untouched);
        let half = 0.5 / 16.0;
        assert!((0..3).all(|i| untouched.row(i).iter().all(|x| x.abs() <= half)));
    }

    #[test]
    fn output_shape_and_reproducibility() {
        let s = snap(4, &[(0, 1), (1, 2), (2, 3), (3, 0)]);
        let p = N2VParams {
            num_walks: 10,
            ..N2VParams::default()
        };
        let a = embed(&s, &p).unwrap();
        assert_eq!((a.node_count(), a.dimensions()), (4, 64));
        assert!(a.is_finite());
        assert_eq!(a, embed(&s, &p).unwrap());
    }

    #[test]
    fn binary_dump_round_trips() {
        let m = EmbeddingMatrix::from_rows(&[vec![1.0, -2.5], vec![0.25, 3.0]]);
        let dir = tempfile::tempdir().unwrap();
        let p = dir.path().join("emb.bin");
        m.write_binary(&p).unwrap();
        assert_eq!(std::fs::metadata(&p).unwrap().len(), 16 + 4 * 8);
        assert_eq!(EmbeddingMatrix::read_binary(&p).unwrap(), m);
    }

    #[test]
    fn empty_corpus_is_rejected() {
        let c = WalkCorpus::from_walks(3, Vec::<Vec<NodeId>>::new());
        assert!(SkipGram::new(&c, &small_params()).is_err());
    }
}
