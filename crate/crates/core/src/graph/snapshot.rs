use super::{DirectedGraph, Group, NodeId};

/// Frozen compressed-sparse-row view of a [`DirectedGraph`].
///
/// Neighbor lists are sorted by node id, so every computation on a snapshot is
/// independent of the insertion history of the graph it was taken from.
#[derive(Debug, Clone, PartialEq)]
pub struct Snapshot {
    labels: Vec<Group>,
    out_offsets: Vec<usize>,
    out_targets: Vec<u32>,
    in_offsets: Vec<usize>,
    in_sources: Vec<u32>,
}

fn csr(n: usize, mut pairs: Vec<(u32, u32)>) -> (Vec<usize>, Vec<u32>) {
    pairs.sort_unstable();
    let mut offsets = vec![0usize; n + 1];
    for &(a, _) in &pairs {
        offsets[a as usize + 1] += 1;
    }
    for i in 0..n {
        offsets[i + 1] += offsets[i];
    }
    (offsets, pairs.into_iter().map(|(_, b)| b).collect())
}

impl Snapshot {
    pub fn from_graph(g: &DirectedGraph) -> Self {
        Self::from_parts(g.labels().to_vec(), g.edges())
    }

    /// Build directly from labels and an edge list with no self-loops or duplicates.
    pub fn from_parts(labels: Vec<Group>, edges: impl IntoIterator<Item = (NodeId, NodeId)>) -> Self {
        let n = labels.len();
        let fwd: Vec<(u32, u32)> = edges.into_iter().map(|(i, j)| (i as u32, j as u32)).collect();
        let rev: Vec<(u32, u32)> = fwd.iter().map(|&(i, j)| (j, i)).collect();
        let (out_offsets, out_targets) = csr(n, fwd);
        let (in_offsets, in_sources) = csr(n, rev);
        Snapshot {
            labels,
            out_offsets,
            out_targets,
            in_offsets,
            in_sources,
        }
    }

    pub fn node_count(&self) -> usize {
        self.labels.len()
    }

    pub fn edge_count(&self) -> usize {
        self.out_targets.len()
    }

    #[inline]
    pub fn out(&self, i: NodeId) -> &[u32] {
        &self.out_targets[self.out_offsets[i]..self.out_offsets[i + 1]]
    }

    #[inline]
    pub fn inc(&self, j: NodeId) -> &[u32] {
        &self.in_sources[self.in_offsets[j]..self.in_offsets[j + 1]]
    }

    #[inline]
    pub fn out_degree(&self, i: NodeId) -> usize {
        self.out_offsets[i + 1] - self.out_offsets[i]
    }

    #[inline]
    pub fn in_degree(&self, j: NodeId) -> usize {
        self.in_offsets[j + 1] - self.in_offsets[j]
    }

    pub fn has_edge(&self, i: NodeId, j: NodeId) -> bool {
        self.out(i).binary_search(&(j as u32)).is_ok()
    }

    pub fn labels(&self) -> &[Group] {
        &self.labels
    }

    pub fn label(&self, i: NodeId) -> Group {
        self.labels[i]
    }

    /// Nodes `j != seed` with no edge `seed -> j`, ascending.
    pub fn candidates(&self, seed: NodeId) -> Vec<NodeId> {
        let out = self.out(seed);
        let mut k = 0;
        let mut cands = Vec::with_capacity(self.node_count() - out.len());
        for j in 0..self.node_count() {
            if k < out.len() && out[k] as usize == j {
                k += 1;
                continue;
            }
            if j != seed {
                cands.push(j);
            }
        }
        cands
    }

    pub fn edges(&self) -> impl Iterator<Item = (NodeId, NodeId)> + '_ {
        (0..self.node_count()).flat_map(move |i| self.out(i).iter().map(move |&j| (i, j as NodeId)))
    }

    pub fn to_graph(&self) -> DirectedGraph {
        DirectedGraph::from_edges(self.labels.clone(), self.edges())
            .expect("snapshot edges are valid by construction")
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::prefix_labels;

    #[test]
    fn csr_lists_are_sorted_and_consistent() {
        let g = DirectedGraph::from_edges(prefix_labels(4, 0.5), [(2, 0), (0, 3), (0, 1), (3, 1)]).unwrap();
        let s = g.snapshot();
        assert_eq!(s.out(0), &[1, 3]);
        assert_eq!(s.inc(1), &[0, 3]);
        assert_eq!(s.edge_count(), 4);
        assert!(s.has_edge(2, 0));
        assert!(!s.has_edge(0, 2));
        assert_eq!(s.candidates(0), vec![2]);
        assert_eq!(s.to_graph(), g);
    }

    #[test]
    fn snapshot_ignores_insertion_order() {
        let a = DirectedGraph::from_edges(prefix_labels(3, 0.0), [(0, 1), (1, 2), (0, 2)]).unwrap();
        let b = DirectedGraph::from_edges(prefix_labels(3, 0.0), [(0, 2), (0, 1), (1, 2)]).unwrap();
        assert_eq!(a.snapshot(), b.snapshot());
    }
}
