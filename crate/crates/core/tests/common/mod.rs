//! Independent reference implementations shared by the integration tests and
//! the acceptance suite. Everything here is written from the definitions with
//! dense matrices or brute-force enumeration; none of it calls the solvers
//! under test.
#![allow(dead_code)]

use linkloop::graph::{prefix_labels, DirectedGraph, Group};
use linkloop::{NodeId, Snapshot};
use nalgebra::{DMatrix, DVector};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// Erdos-Renyi-style digraph on 2..=max_n nodes with a random edge
/// probability; labels are random.
pub fn random_graph(seed: u64, max_n: usize) -> DirectedGraph {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let n = rng.random_range(2..=max_n);
    let p: f64 = rng.random_range(0.05..0.5);
    let labels: Vec<Group> = (0..n)
        .map(|_| if rng.random_bool(0.3) { Group::Minority } else { Group::Majority })
        .collect();
    let mut g = DirectedGraph::new(labels);
    for i in 0..n {
        for j in 0..n {
            if i != j && rng.random_bool(p) {
                g.add_edge(i, j).unwrap();
            }
        }
    }
    g
}

pub fn graph(n: usize, edges: &[(usize, usize)]) -> DirectedGraph {
    DirectedGraph::from_edges(prefix_labels(n, 0.0), edges.iter().copied()).unwrap()
}

fn adjacency(snap: &Snapshot) -> DMatrix<f64> {
    let n = snap.node_count();
    let mut a = DMatrix::zeros(n, n);
    for (i, j) in snap.edges() {
        a[(i, j)] = 1.0;
    }
    a
}

/// Solve pi = (1 - alpha) t + alpha (P^T pi + (dangling mass) t) for the
/// teleport distribution t, as one dense linear system.
fn dense_pagerank(snap: &Snapshot, alpha: f64, teleport: DVector<f64>) -> Vec<f64> {
    let n = snap.node_count();
    let a = adjacency(snap);
    let mut m = DMatrix::<f64>::identity(n, n);
    for i in 0..n {
        let d = snap.out_degree(i);
        for j in 0..n {
            // Column i of P^T (+ dangling redistribution) describes where the
            // mass at i goes.
            let flow = if d == 0 { teleport[j] } else { a[(i, j)] / d as f64 };
            m[(j, i)] -= alpha * flow;
        }
    }
    let rhs = teleport * (1.0 - alpha);
    let x = m.lu().solve(&rhs).expect("nonsingular PageRank system");
    x.iter().copied().collect()
}

pub fn dense_ppr(snap: &Snapshot, seed: NodeId, alpha: f64) -> Vec<f64> {
    let mut t = DVector::zeros(snap.node_count());
    t[seed] = 1.0;
    dense_pagerank(snap, alpha, t)
}

pub fn dense_global_pagerank(snap: &Snapshot, alpha: f64) -> Vec<f64> {
    let n = snap.node_count();
    dense_pagerank(snap, alpha, DVector::from_element(n, 1.0 / n as f64))
}

/// SALSA authority weights by explicit construction of the authority ->
/// hub -> authority transition matrix and plain power iteration from the
/// uniform vector.
pub fn dense_salsa(snap: &Snapshot, hubs: &[NodeId]) -> Vec<(NodeId, f64)> {
    let mut auth: Vec<NodeId> = hubs.iter().flat_map(|&h| snap.out(h).iter().map(|&a| a as NodeId)).collect();
    auth.sort_unstable();
    auth.dedup();
    let (nh, na) = (hubs.len(), auth.len());
    if na == 0 {
        return Vec::new();
    }
    // Bipartite incidence W[h][a] = 1 when hub h follows authority a.
    let mut w = DMatrix::<f64>::zeros(nh, na);
    for (hi, &h) in hubs.iter().enumerate() {
        for (ai, &a) in auth.iter().enumerate() {
            if snap.has_edge(h, a) {
                w[(hi, ai)] = 1.0;
            }
        }
    }
    // Row-normalized moves: authority -> hub along in-links, hub -> authority
    // along out-links.
    let mut a_to_h = w.transpose();
    for r in 0..na {
        let s: f64 = a_to_h.row(r).sum();
        a_to_h.row_mut(r).scale_mut(1.0 / s);
    }
    let mut h_to_a = w.clone();
    for r in 0..nh {
        let s: f64 = h_to_a.row(r).sum();
        if s > 0.0 {
            h_to_a.row_mut(r).scale_mut(1.0 / s);
        }
    }
    let chain = &a_to_h * &h_to_a;
    let mut x = DVector::from_element(na, 1.0 / na as f64);
    for _ in 0..1_000_000 {
        let next = chain.transpose() * &x;
        let diff = (&next - &x).abs().sum();
        x = next;
        if diff < 1e-15 {
            break;
        }
    }
    auth.into_iter().zip(x.iter().copied()).collect()
}

/// Number of length-2 paths i -> k -> j, enumerated over all k.
pub fn brute_two_hops(g: &DirectedGraph, i: NodeId, j: NodeId) -> u64 {
    (0..g.node_count()).filter(|&k| g.has_edge(i, k) && g.has_edge(k, j)).count() as u64
}

/// Size of the intersection of the followee sets of i and j.
pub fn brute_common_followed(g: &DirectedGraph, i: NodeId, j: NodeId) -> u64 {
    let a: std::collections::BTreeSet<_> = g.out_neighbors(i).collect();
    let b: std::collections::BTreeSet<_> = g.out_neighbors(j).collect();
    a.intersection(&b).count() as u64
}

/// Fagiolo clustering from dense matrix powers.
pub fn dense_clustering(snap: &Snapshot) -> f64 {
    let n = snap.node_count();
    let a = adjacency(snap);
    let b = &a + a.transpose();
    let b3 = &b * &b * &b;
    let a2 = &a * &a;
    let mut total = 0.0;
    for i in 0..n {
        let d_tot: f64 = a.row(i).sum() + a.column(i).sum();
        let d_bi = a2[(i, i)];
        let denom = d_tot * (d_tot - 1.0) - 2.0 * d_bi;
        if denom > 0.0 {
            total += b3[(i, i)] / 2.0 / denom;
        }
    }
    total / n as f64
}

pub fn linf(a: &[f64], b: &[f64]) -> f64 {
    assert_eq!(a.len(), b.len());
    a.iter().zip(b).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max)
}

/// Spearman rank correlation (average ranks for ties).
pub fn spearman(x: &[f64], y: &[f64]) -> f64 {
    fn ranks(v: &[f64]) -> Vec<f64> {
        let mut idx: Vec<usize> = (0..v.len()).collect();
        idx.sort_by(|&a, &b| v[a].total_cmp(&v[b]));
        let mut r = vec![0.0; v.len()];
        let mut k = 0;
        while k < idx.len() {
            let mut e = k;
            while e + 1 < idx.len() && v[idx[e + 1]] == v[idx[k]] {
                e += 1;
            }
            let avg = (k + e) as f64 / 2.0 + 1.0;
            for &i in &idx[k..=e] {
                r[i] = avg;
            }
            k = e + 1;
        }
        r
    }
    let (rx, ry) = (ranks(x), ranks(y));
    let n = x.len() as f64;
    let (mx, my) = (rx.iter().sum::<f64>() / n, ry.iter().sum::<f64>() / n);
    let cov: f64 = rx.iter().zip(&ry).map(|(a, b)| (a - mx) * (b - my)).sum();
    let vx: f64 = rx.iter().map(|a| (a - mx).powi(2)).sum();
    let vy: f64 = ry.iter().map(|b| (b - my).powi(2)).sum();
    cov / (vx * vy).sqrt()
}
