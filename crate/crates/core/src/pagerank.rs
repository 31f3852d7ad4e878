//! Power-iteration PageRank on a [`Snapshot`], personalized or global.
//!
//! Iterates `x <- (1 - alpha) t + alpha W^T x` where `W` is the row-stochastic
//! out-link matrix and `t` the teleport distribution. Dangling rows send their
//! mass to `t`: the seed for the personalized variant, uniform for the global
//! one. Stops once the L1 change between iterates drops below `tol`.

use crate::error::{Error, Result};
use crate::graph::{NodeId, Snapshot};

pub const DEFAULT_ALPHA: f64 = 0.85;
pub const DEFAULT_TOL: f64 = 1e-10;
pub const DEFAULT_MAX_ITER: usize = 1000;

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Teleport {
    Seed(NodeId),
    Uniform,
}

/// Reusable solver holding per-snapshot precomputation and scratch space.
#[derive(Debug, Clone)]
pub struct PageRankSolver<'a> {
    snap: &'a Snapshot,
    alpha: f64,
    tol: f64,
    max_iter: usize,
    inv_out: Vec<f64>,
    dangling: Vec<u32>,
}

impl<'a> PageRankSolver<'a> {
    pub fn new(snap: &'a Snapshot, alpha: f64, tol: f64) -> Result<Self> {
        if !(alpha > 0.0 && alpha < 1.0) {
            return Err(Error::InvalidArgument(format!("alpha must lie in (0, 1), got {alpha}")));
        }
        if !(tol > 0.0) {
            return Err(Error::InvalidArgument(format!("tol must be positive, got {tol}")));
        }
        let n = snap.node_count();
        let mut inv_out = vec![0.0; n];
        let mut dangling = Vec::new();
        for (u, w) in inv_out.iter_mut().enumerate() {
            match snap.out_degree(u) {
                0 => dangling.push(u as u32),
                d => *w = 1.0 / d as f64,
            }
        }
        Ok(PageRankSolver {
            snap,
            alpha,
            tol,
            max_iter: DEFAULT_MAX_ITER,
            inv_out,
            dangling,
        })
    }

    pub fn with_max_iter(mut self, max_iter: usize) -> Self {
        self.max_iter = max_iter;
        self
    }

    pub fn solve(&self, teleport: Teleport) -> Result<Vec<f64>> {
        let n = self.snap.node_count();
        if n == 0 {
            return Ok(Vec::new());
        }
        if let Teleport::Seed(s) = teleport {
            if s >= n {
                return Err(Error::InvalidArgument(format!("seed {s} out of range (n = {n})")));
            }
        }
        let mut x = match teleport {
            Teleport::Seed(s) => {
                let mut v = vec![0.0; n];
                v[s] = 1.0;
                v
            }
            Teleport::Uniform => vec![1.0 / n as f64; n],
        };
        let mut y = vec![0.0; n];
        let mut z = vec![0.0; n];
        let alpha = self.alpha;
        let mut residual = f64::INFINITY;
        for _ in 0..self.max_iter {
            for ((zu, &xu), &w) in z.iter_mut().zip(&x).zip(&self.inv_out) {
                *zu = xu * w;
            }
            let dangling_mass: f64 = self.dangling.iter().map(|&u| x[u as usize]).sum();
            for (v, yv) in y.iter_mut().enumerate() {
                let acc: f64 = self.snap.inc(v).iter().map(|&u| z[u as usize]).sum();
                *yv = alpha * acc;
            }
            let jump = (1.0 - alpha) + alpha * dangling_mass;
            match teleport {
                Teleport::Seed(s) => y[s] += jump,
                Teleport::Uniform => {
                    let share = jump / n as f64;
                    y.iter_mut().for_each(|yv| *yv += share);
                }
            }
            residual = x.iter().zip(&y).map(|(a, b)| (a - b).abs()).sum();
            std::mem::swap(&mut x, &mut y);
            if residual < self.tol {
                return Ok(x);
            }
        }
        Err(Error::NotConverged {
            what: "pagerank",
            iterations: self.max_iter,
            residual,
        })
    }
}

/// Personalized PageRank vector from `seed` over all nodes.
pub fn personalized_pagerank(snap: &Snapshot, seed: NodeId, alpha: f64, tol: f64) -> Result<Vec<f64>> {
    PageRankSolver::new(snap, alpha, tol)?.solve(Teleport::Seed(seed))
}

/// Global PageRank with uniform teleport.
pub fn global_pagerank(snap: &Snapshot, alpha: f64, tol: f64) -> Result<Vec<f64>> {
    PageRankSolver::new(snap, alpha, tol)?.solve(Teleport::Uniform)
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

    #[test]
    fn isolated_node_keeps_all_mass() {
        let pi = personalized_pagerank(&snap(1, &[]), 0, 0.85, 1e-10).unwrap();
        assert_eq!(pi, vec![1.0]);
    }

    #[test]
    fn two_cycle_matches_closed_form() {
        let pi = personalized_pagerank(&snap(2, &[(0, 1), (1, 0)]), 0, 0.85, 1e-12).unwrap();
        let p0 = 0.15 / (1.0 - 0.85 * 0.85);
        assert!((pi[0] - p0).abs() < 1e-10);
        assert!((pi[1] - (1.0 - p0)).abs() < 1e-10);
        assert!((pi[0] - 0.540540540540).abs() < 1e-9);
    }

    #[test]
    fn dangling_mass_returns_to_seed() {
        // 0 -> 1, 1 is dangling: pi_1 = 0.85 pi_0, pi_0 + pi_1 = 1.
        let pi = personalized_pagerank(&snap(3, &[(0, 1)]), 0, 0.85, 1e-12).unwrap();
        assert!((pi[0] - 1.0 / 1.85).abs() < 1e-10);
        assert_eq!(pi[2], 0.0);
        assert!((pi.iter().sum::<f64>() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn bad_parameters_are_rejected() {
        let s = snap(2, &[(0, 1)]);
        assert!(personalized_pagerank(&s, 0, 1.0, 1e-10).is_err());
        assert!(personalized_pagerank(&s, 0, 0.85, 0.0).is_err());
        assert!(personalized_pagerank(&s, 5, 0.85, 1e-10).is_err());
    }

    #[test]
    fn iteration_cap_reports_residual() {
        let s = snap(3, &[(0, 1), (1, 2), (2, 0)]);
        let err = PageRankSolver::new(&s, 0.85, 1e-14)
            .unwrap()
            .with_max_iter(3)
            .solve(Teleport::Seed(0))
            .unwrap_err();
        match err {
            Error::NotConverged { iterations, residual, .. } => {
                assert_eq!(iterations, 3);
                assert!(residual > 0.0);
            }
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn global_pagerank_sums_to_one() {
        let s = snap(4, &[(0, 1), (1, 2), (2, 0), (3, 0)]);
        let pi = global_pagerank(&s, 0.85, 1e-12).unwrap();
        assert!((pi.iter().sum::<f64>() - 1.0).abs() < 1e-12);
        assert!(pi[0] > pi[3]);
    }
}
