//! Directed preferential attachment with homophily (DPAH).
//!
//! `n` nodes are labeled by the deterministic count rule, each gets an activity
//! weight from a capped Pareto law with its group's exponent, and edges are
//! added until `round(d * n * (n - 1))` exist. Each edge picks a source by
//! activity and a target `j` with probability proportional to
//! `h(c_i, c_j) * (k_in(j) + 1)` among nodes the source does not yet follow.

use std::path::Path;

use rand::distr::weighted::WeightedIndex;
use rand::distr::Distribution;
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::{minority_count, DirectedGraph, Group, NodeId};
use crate::rng::{stream, Purpose, SimRng};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DpahParams {
    pub n: usize,
    pub f_m: f64,
    pub h_mm: f64,
    #[serde(rename = "h_MM")]
    pub h_maj: f64,
    pub gamma_m: f64,
    #[serde(rename = "gamma_M")]
    pub gamma_maj: f64,
    pub density: f64,
    pub seed: u64,
}

impl Default for DpahParams {
    fn default() -> Self {
        DpahParams {
            n: 1000,
            f_m: 0.3,
            h_mm: 0.5,
            h_maj: 0.5,
            gamma_m: 2.5,
            gamma_maj: 2.5,
            density: 0.03,
            seed: 0,
        }
    }
}

impl DpahParams {
    pub fn validate(&self) -> Result<()> {
        let bad = |msg: String| Err(Error::InvalidArgument(msg));
        if self.n < 2 {
            return bad(format!("n must be at least 2, got {}", self.n));
        }
        for (name, v) in [("f_m", self.f_m), ("h_mm", self.h_mm), ("h_MM", self.h_maj)] {
            if !(0.0..=1.0).contains(&v) {
                return bad(format!("{name} must lie in [0, 1], got {v}"));
            }
        }
        for (name, v) in [("gamma_m", self.gamma_m), ("gamma_M", self.gamma_maj)] {
            if !(v > 1.0 && v.is_finite()) {
                return bad(format!("{name} must be > 1, got {v}"));
            }
        }
        if !(self.density > 0.0 && self.density < 1.0) {
            return bad(format!("density must lie in (0, 1), got {}", self.density));
        }
        Ok(())
    }

    /// Validation plus the density-capacity check.
    pub fn check_reachable(&self) -> Result<()> {
        self.validate()?;
        let target = self.target_edges();
        let capacity = self.capacity();
        if target > capacity {
            let (m, maj) = self.group_sizes();
            return Err(Error::Generation(format!(
                "target of {target} edges exceeds the capacity of {capacity} ordered pairs allowed by \
                 h_mm={}, h_MM={} with {m} minority and {maj} majority nodes",
                self.h_mm, self.h_maj
            )));
        }
        Ok(())
    }

    pub fn target_edges(&self) -> usize {
        (self.density * self.n as f64 * (self.n as f64 - 1.0)).round() as usize
    }

    pub fn homophily(&self) -> Homophily {
        Homophily {
            h_mm: self.h_mm,
            h_maj: self.h_maj,
        }
    }

    pub fn group_sizes(&self) -> (usize, usize) {
        let m = minority_count(self.n, self.f_m);
        (m, self.n - m)
    }

    /// Ordered pairs `(i, j)`, `i != j`, with positive homophily weight.
    pub fn capacity(&self) -> usize {
        let (m, maj) = self.group_sizes();
        let h = self.homophily();
        let block = |src: Group, tgt: Group, pairs: usize| if h.weight(src, tgt) > 0.0 { pairs } else { 0 };
        block(Group::Minority, Group::Minority, m * m.saturating_sub(1))
            + block(Group::Minority, Group::Majority, m * maj)
            + block(Group::Majority, Group::Minority, maj * m)
            + block(Group::Majority, Group::Majority, maj * maj.saturating_sub(1))
    }

    pub fn write_sidecar(&self, path: impl AsRef<Path>) -> Result<()> {
        let path = path.as_ref();
        let body = serde_json::to_string_pretty(self)?;
        std::fs::write(path, body + "\n").map_err(|e| Error::io(path, e))
    }
}

/// In-group homophily per group; cross-group weights are the complements.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Homophily {
    pub h_mm: f64,
    pub h_maj: f64,
}

impl Homophily {
    pub fn weight(&self, source: Group, target: Group) -> f64 {
        match (source, target) {
            (Group::Minority, Group::Minority) => self.h_mm,
            (Group::Minority, Group::Majority) => 1.0 - self.h_mm,
            (Group::Majority, Group::Majority) => self.h_maj,
            (Group::Majority, Group::Minority) => 1.0 - self.h_maj,
        }
    }
}

/// Source-selection weights.
#[derive(Debug, Clone)]
pub struct ActivityTable {
    weights: Vec<f64>,
    index: WeightedIndex<f64>,
}

impl ActivityTable {
    pub fn from_weights(weights: Vec<f64>) -> Result<Self> {
        if weights.iter().any(|&w| !(w > 0.0 && w.is_finite())) {
            return Err(Error::InvalidArgument("activity weights must be positive and finite".into()));
        }
        let index = WeightedIndex::new(&weights)
            .map_err(|e| Error::InvalidArgument(format!("activity table: {e}")))?;
        Ok(ActivityTable { weights, index })
    }

    /// Pareto weights `u^(-1 / (gamma - 1))`, `u ~ U(0, 1]`, capped at `cap`.
    pub fn power_law<R: Rng + ?Sized>(
        labels: &[Group],
        gamma_m: f64,
        gamma_maj: f64,
        cap: f64,
        rng: &mut R,
    ) -> Result<Self> {
        let weights = labels
            .iter()
            .map(|g| {
                let gamma = if g.is_minority() { gamma_m } else { gamma_maj };
                let u = 1.0 - rng.random::<f64>();
                u.powf(-1.0 / (gamma - 1.0)).min(cap)
            })
            .collect();
        Self::from_weights(weights)
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> NodeId {
        self.index.sample(rng)
    }

    /// Stop drawing `node`. Errors when no node with positive weight remains.
    fn retire(&mut self, node: NodeId) -> Result<()> {
        self.weights[node] = 0.0;
        self.index
            .update_weights(&[(node, &0.0)])
            .map_err(|_| Error::Generation("every source node is saturated".into()))
    }
}

/// Draw a target for `source` with probability `h * (k_in + 1)` over eligible
/// nodes: not the source, not already followed, positive homophily.
pub fn sample_target<R: Rng + ?Sized>(
    g: &DirectedGraph,
    source: NodeId,
    h: &Homophily,
    rng: &mut R,
) -> Result<NodeId> {
    let mut excluded = vec![false; g.node_count()];
    sample_target_with(g, source, h, &mut excluded, rng)
}

fn sample_target_with<R: Rng + ?Sized>(
    g: &DirectedGraph,
    source: NodeId,
    h: &Homophily,
    excluded: &mut [bool],
    rng: &mut R,
) -> Result<NodeId> {
    let src_group = g.label(source);
    let same = h.weight(src_group, src_group);
    let cross = h.weight(src_group, src_group.other());
    let weight = |l: NodeId| {
        let hw = if g.label(l) == src_group { same } else { cross };
        hw * (g.in_degree(l) + 1) as f64
    };
    excluded[source] = true;
    for j in g.out_neighbors(source) {
        excluded[j] = true;
    }
    let total: f64 = (0..g.node_count()).filter(|&l| !excluded[l]).map(weight).sum();
    let mut pick = None;
    if total > 0.0 {
        let r = rng.random::<f64>() * total;
        let mut acc = 0.0;
        for l in (0..g.node_count()).filter(|&l| !excluded[l]) {
            let w = weight(l);
            if w > 0.0 {
                acc += w;
                pick = Some(l);
                if acc > r {
                    break;
                }
            }
        }
    }
    excluded[source] = false;
    for j in g.out_neighbors(source) {
        excluded[j] = false;
    }
    pick.ok_or(Error::NoEligibleTarget { source_node: source })
}

/// Incremental generator; [`generate`] runs it to completion.
#[derive(Debug)]
pub struct DpahGenerator {
    params: DpahParams,
    homophily: Homophily,
    graph: DirectedGraph,
    activity: ActivityTable,
    rng: SimRng,
    scratch: Vec<bool>,
    target: usize,
}

impl DpahGenerator {
    pub fn new(params: DpahParams) -> Result<Self> {
        params.check_reachable()?;
        let target = params.target_edges();
        let graph = DirectedGraph::with_minority_fraction(params.n, params.f_m);
        let mut act_rng = stream(params.seed, Purpose::Activity, &[]);
        let mut activity = ActivityTable::power_law(
            graph.labels(),
            params.gamma_m,
            params.gamma_maj,
            params.n as f64,
            &mut act_rng,
        )?;
        // Sources whose every target has zero homophily can never emit an edge.
        let h = params.homophily();
        let (m, maj) = params.group_sizes();
        for i in 0..params.n {
            let g = graph.label(i);
            let same_pool = if g.is_minority() { m - 1 } else { maj - 1 };
            let cross_pool = if g.is_minority() { maj } else { m };
            let reachable = (h.weight(g, g) > 0.0 && same_pool > 0) || (h.weight(g, g.other()) > 0.0 && cross_pool > 0);
            if !reachable && target > 0 {
                activity.retire(i)?;
            }
        }
        Ok(DpahGenerator {
            homophily: h,
            scratch: vec![false; params.n],
            rng: stream(params.seed, Purpose::Generation, &[]),
            params,
            graph,
            activity,
            target,
        })
    }

    pub fn params(&self) -> &DpahParams {
        &self.params
    }

    pub fn graph(&self) -> &DirectedGraph {
        &self.graph
    }

    pub fn activity(&self) -> &ActivityTable {
        &self.activity
    }

    pub fn homophily(&self) -> Homophily {
        self.homophily
    }

    pub fn is_complete(&self) -> bool {
        self.graph.edge_count() >= self.target
    }

    /// Add one edge; saturated sources are resampled.
    pub fn next_edge(&mut self) -> Result<(NodeId, NodeId)> {
        loop {
            let source = self.activity.sample(&mut self.rng);
            match sample_target_with(&self.graph, source, &self.homophily, &mut self.scratch, &mut self.rng) {
                Ok(target) => {
                    self.graph.add_edge(source, target)?;
                    return Ok((source, target));
                }
                Err(Error::NoEligibleTarget { .. }) => self.activity.retire(source)?,
                Err(e) => return Err(e),
            }
        }
    }

    pub fn finish(mut self) -> Result<DirectedGraph> {
        while !self.is_complete() {
            self.next_edge()?;
        }
        Ok(self.graph)
    }
}

pub fn generate(params: &DpahParams) -> Result<DirectedGraph> {
    DpahGenerator::new(params.clone())?.finish()
}
