//! Directed attributed graph with binary group labels.
//!
//! [`DirectedGraph`] is the mutable state of the feedback loop. Adjacency is
//! kept in insertion-ordered index sets so that membership tests, removals and
//! uniform random picks are all O(1) expected. [`Snapshot`] is the frozen,
//! sorted CSR view that recommenders and metrics read.

mod io;
mod snapshot;

pub use io::{read_edge_list, write_edge_list, EdgeListHeader};
pub use snapshot::Snapshot;

use indexmap::IndexSet;
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub type NodeId = usize;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Group {
    Minority,
    Majority,
}

impl Group {
    pub fn is_minority(self) -> bool {
        self == Group::Minority
    }

    pub fn other(self) -> Group {
        match self {
            Group::Minority => Group::Majority,
            Group::Majority => Group::Minority,
        }
    }
}

/// Number of minority nodes under the deterministic count rule `round(n * f_m)`.
pub fn minority_count(n: usize, f_m: f64) -> usize {
    ((n as f64) * f_m).round().clamp(0.0, n as f64) as usize
}

/// Labels with ids `0..round(n * f_m)` in the minority.
pub fn prefix_labels(n: usize, f_m: f64) -> Vec<Group> {
    let n_m = minority_count(n, f_m);
    (0..n)
        .map(|i| if i < n_m { Group::Minority } else { Group::Majority })
        .collect()
}

#[derive(Debug, Clone)]
pub struct DirectedGraph {
    labels: Vec<Group>,
    out_adj: Vec<IndexSet<u32>>,
    in_adj: Vec<IndexSet<u32>>,
    edges: IndexSet<(u32, u32)>,
}

impl DirectedGraph {
    pub fn new(labels: Vec<Group>) -> Self {
        let n = labels.len();
        assert!(n <= u32::MAX as usize, "node count exceeds u32 id space");
        DirectedGraph {
            labels,
            out_adj: vec![IndexSet::new(); n],
            in_adj: vec![IndexSet::new(); n],
            edges: IndexSet::new(),
        }
    }

    /// Empty graph whose first `round(n * f_m)` nodes are minority.
    pub fn with_minority_fraction(n: usize, f_m: f64) -> Self {
        Self::new(prefix_labels(n, f_m))
    }

    pub fn from_edges(labels: Vec<Group>, edges: impl IntoIterator<Item = (NodeId, NodeId)>) -> Result<Self> {
        let mut g = Self::new(labels);
        for (i, j) in edges {
            g.add_edge(i, j)?;
        }
        Ok(g)
    }

    pub fn node_count(&self) -> usize {
        self.labels.len()
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    fn check_node(&self, i: NodeId) -> Result<()> {
        if i >= self.node_count() {
            return Err(Error::InvalidArgument(format!(
                "node id {i} out of range (n = {})",
                self.node_count()
            )));
        }
        Ok(())
    }

    /// Insert `i -> j`. Returns `false` if the edge already existed.
    pub fn add_edge(&mut self, i: NodeId, j: NodeId) -> Result<bool> {
        self.check_node(i)?;
        self.check_node(j)?;
        if i == j {
            return Err(Error::InvalidArgument(format!("self-loop {i} -> {i}")));
        }
        if !self.edges.insert((i as u32, j as u32)) {
            return Ok(false);
        }
        self.out_adj[i].insert(j as u32);
        self.in_adj[j].insert(i as u32);
        Ok(true)
    }

    /// Remove `i -> j`. Returns `true` iff the edge existed.
    pub fn remove_edge(&mut self, i: NodeId, j: NodeId) -> Result<bool> {
        self.check_node(i)?;
        self.check_node(j)?;
        if !self.edges.swap_remove(&(i as u32, j as u32)) {
            return Ok(false);
        }
        self.out_adj[i].swap_remove(&(j as u32));
        self.in_adj[j].swap_remove(&(i as u32));
        Ok(true)
    }

    pub fn has_edge(&self, i: NodeId, j: NodeId) -> bool {
        self.edges.contains(&(i as u32, j as u32))
    }

    pub fn out_neighbors(&self, i: NodeId) -> impl ExactSizeIterator<Item = NodeId> + '_ {
        self.out_adj[i].iter().map(|&j| j as NodeId)
    }

    pub fn in_neighbors(&self, j: NodeId) -> impl ExactSizeIterator<Item = NodeId> + '_ {
        self.in_adj[j].iter().map(|&i| i as NodeId)
    }

    pub fn out_degree(&self, i: NodeId) -> usize {
        self.out_adj[i].len()
    }

    pub fn in_degree(&self, j: NodeId) -> usize {
        self.in_adj[j].len()
    }

    /// Edges in insertion (index-set) order.
    pub fn edges(&self) -> impl ExactSizeIterator<Item = (NodeId, NodeId)> + '_ {
        self.edges.iter().map(|&(i, j)| (i as NodeId, j as NodeId))
    }

    /// Edges sorted by `(source, target)`.
    pub fn sorted_edges(&self) -> Vec<(NodeId, NodeId)> {
        let mut e: Vec<_> = self.edges().collect();
        e.sort_unstable();
        e
    }

    pub fn label(&self, i: NodeId) -> Group {
        self.labels[i]
    }

    pub fn labels(&self) -> &[Group] {
        &self.labels
    }

    /// Replace every label, keeping the topology.
    pub fn set_labels(&mut self, labels: Vec<Group>) -> Result<()> {
        if labels.len() != self.node_count() {
            return Err(Error::InvalidArgument(format!(
                "expected {} labels, got {}",
                self.node_count(),
                labels.len()
            )));
        }
        self.labels = labels;
        Ok(())
    }

    /// `(minority count, majority count)`.
    pub fn group_counts(&self) -> (usize, usize) {
        let m = self.labels.iter().filter(|g| g.is_minority()).count();
        (m, self.node_count() - m)
    }

    pub fn minority_fraction(&self) -> f64 {
        if self.node_count() == 0 {
            return 0.0;
        }
        self.group_counts().0 as f64 / self.node_count() as f64
    }

    /// Uniformly random out-neighbor of `i`, skipping `exclude`.
    pub fn random_out_neighbor<R: Rng + ?Sized>(
        &self,
        i: NodeId,
        exclude: Option<NodeId>,
        rng: &mut R,
    ) -> Option<NodeId> {
        let set = &self.out_adj[i];
        match exclude.and_then(|x| set.get_index_of(&(x as u32))) {
            None if set.is_empty() => None,
            None => Some(set[rng.random_range(0..set.len())] as NodeId),
            Some(_) if set.len() == 1 => None,
            Some(skip) => {
                let mut k = rng.random_range(0..set.len() - 1);
                if k >= skip {
                    k += 1;
                }
                Some(set[k] as NodeId)
            }
        }
    }

    /// Uniformly random edge, skipping `exclude`.
    pub fn random_edge<R: Rng + ?Sized>(
        &self,
        exclude: Option<(NodeId, NodeId)>,
        rng: &mut R,
    ) -> Option<(NodeId, NodeId)> {
        let skip = exclude.and_then(|(i, j)| self.edges.get_index_of(&(i as u32, j as u32)));
        let len = self.edges.len() - usize::from(skip.is_some());
        if len == 0 {
            return None;
        }
        let mut k = rng.random_range(0..len);
        if let Some(s) = skip {
            if k >= s {
                k += 1;
            }
        }
        let (i, j) = self.edges[k];
        Some((i as NodeId, j as NodeId))
    }

    pub fn snapshot(&self) -> Snapshot {
        Snapshot::from_graph(self)
    }
}

impl PartialEq for DirectedGraph {
    fn eq(&self, other: &Self) -> bool {
        self.labels == other.labels
            && self.edges.len() == other.edges.len()
            && self.edges.iter().all(|e| other.edges.contains(e))
    }
}

impl Eq for DirectedGraph {}
