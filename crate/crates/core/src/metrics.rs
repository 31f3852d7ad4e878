//! Structural and fairness metrics evaluated on a frozen snapshot.

use serde::{Deserialize, Serialize};

use crate::error::Result;
use crate::graph::{Group, Snapshot};
use crate::pagerank::{global_pagerank, DEFAULT_ALPHA, DEFAULT_TOL};

pub const DEFAULT_TOP_FRACTION: f64 = 0.10;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MetricsSnapshot {
    pub clustering: f64,
    pub gini_in: f64,
    /// Minority share of the PageRank top set.
    pub visibility_m: f64,
    /// `visibility_m - f_m`.
    pub relative_visibility: f64,
    pub inlink_ratio_m: f64,
    #[serde(rename = "inlink_ratio_M")]
    pub inlink_ratio_maj: f64,
}

impl MetricsSnapshot {
    pub fn compute(snap: &Snapshot) -> Result<Self> {
        let vis = visibility(snap, DEFAULT_ALPHA, DEFAULT_TOP_FRACTION)?;
        let (i_m, i_maj) = in_group_ratios(snap);
        Ok(MetricsSnapshot {
            clustering: clustering_coefficient(snap),
            gini_in: gini_in_degree(snap),
            visibility_m: vis.visibility,
            relative_visibility: vis.relative,
            inlink_ratio_m: i_m,
            inlink_ratio_maj: i_maj,
        })
    }
}

/// Mean directed clustering coefficient with Fagiolo's normalization.
///
/// With `B = A + A^T`, node `i` has `t_i = (B^3)_ii / 2` directed triangles and
/// `c_i = t_i / (d_tot (d_tot - 1) - 2 d_recip)`, or 0 when that denominator
/// vanishes. A fully bidirected clique scores exactly 1.
pub fn clustering_coefficient(snap: &Snapshot) -> f64 {
    let n = snap.node_count();
    if n == 0 {
        return 0.0;
    }
    // Symmetrized neighbor lists with multiplicity b_ij in {1, 2}.
    let sym: Vec<Vec<(u32, u8)>> = (0..n)
        .map(|i| {
            let (out, inc) = (snap.out(i), snap.inc(i));
            let mut merged = Vec::with_capacity(out.len() + inc.len());
            let (mut a, mut b) = (0, 0);
            while a < out.len() || b < inc.len() {
                match (out.get(a), inc.get(b)) {
                    (Some(&x), Some(&y)) if x == y => {
                        merged.push((x, 2));
                        a += 1;
                        b += 1;
                    }
                    (Some(&x), Some(&y)) if x < y => {
                        merged.push((x, 1));
                        a += 1;
                    }
                    (Some(&x), None) => {
                        merged.push((x, 1));
                        a += 1;
                    }
                    (_, Some(&y)) => {
                        merged.push((y, 1));
                        b += 1;
                    }
                    (None, None) => unreachable!(),
                }
            }
            merged
        })
        .collect();

    let mut mark = vec![0u8; n];
    let mut total = 0.0;
    for i in 0..n {
        let d_tot = (snap.out_degree(i) + snap.in_degree(i)) as f64;
        let d_recip = sym[i].iter().filter(|&&(_, w)| w == 2).count() as f64;
        let denom = d_tot * (d_tot - 1.0) - 2.0 * d_recip;
        if denom <= 0.0 {
            continue;
        }
        for &(k, w) in &sym[i] {
            mark[k as usize] = w;
        }
        let mut closed = 0u64;
        for &(j, b_ij) in &sym[i] {
            let mut inner = 0u64;
            for &(k, b_jk) in &sym[j as usize] {
                inner += u64::from(b_jk) * u64::from(mark[k as usize]);
            }
            closed += u64::from(b_ij) * inner;
        }
        for &(k, _) in &sym[i] {
            mark[k as usize] = 0;
        }
        total += (closed as f64 / 2.0) / denom;
    }
    total / n as f64
}

/// Gini coefficient of non-negative values; 0 for empty, single or all-zero input.
pub fn gini(values: &[f64]) -> f64 {
    let n = values.len();
    let sum: f64 = values.iter().sum();
    if n <= 1 || sum <= 0.0 {
        return 0.0;
    }
    let mut sorted = values.to_vec();
    sorted.sort_by(f64::total_cmp);
    let nf = n as f64;
    let weighted: f64 = sorted
        .iter()
        .enumerate()
        .map(|(k, &x)| (2.0 * (k + 1) as f64 - nf - 1.0) * x)
        .sum();
    weighted / (nf * sum)
}

pub fn gini_in_degree(snap: &Snapshot) -> f64 {
    let deg: Vec<f64> = (0..snap.node_count()).map(|j| snap.in_degree(j) as f64).collect();
    gini(&deg)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Visibility {
    pub visibility: f64,
    pub relative: f64,
    pub top_size: usize,
}

/// Size of the top set: `ceil(top_fraction * n)`, at least 1 for non-empty graphs.
pub fn top_set_size(n: usize, top_fraction: f64) -> usize {
    if n == 0 {
        return 0;
    }
    // Guard against 0.1 * 1000 landing a hair above an integer.
    let raw = top_fraction * n as f64;
    ((raw - 1e-9).ceil() as usize).clamp(1, n)
}

/// Top `ceil(top_fraction * n)` nodes by global PageRank; ties at the cutoff
/// are admitted in ascending node-id order.
pub fn top_ranked(scores: &[f64], top_fraction: f64) -> Vec<usize> {
    let mut order: Vec<usize> = (0..scores.len()).collect();
    order.sort_by(|&a, &b| scores[b].total_cmp(&scores[a]).then(a.cmp(&b)));
    order.truncate(top_set_size(scores.len(), top_fraction));
    order
}

pub fn visibility(snap: &Snapshot, alpha: f64, top_fraction: f64) -> Result<Visibility> {
    let n = snap.node_count();
    let f_m = minority_fraction(snap.labels());
    if n == 0 {
        return Ok(Visibility {
            visibility: 0.0,
            relative: -f_m,
            top_size: 0,
        });
    }
    let pr = global_pagerank(snap, alpha, DEFAULT_TOL)?;
    let top = top_ranked(&pr, top_fraction);
    let minority = top.iter().filter(|&&v| snap.label(v).is_minority()).count();
    let vis = minority as f64 / top.len() as f64;
    Ok(Visibility {
        visibility: vis,
        relative: vis - f_m,
        top_size: top.len(),
    })
}

pub fn delta_visibility(before: f64, after: f64) -> f64 {
    after - before
}

fn minority_fraction(labels: &[Group]) -> f64 {
    if labels.is_empty() {
        return 0.0;
    }
    labels.iter().filter(|g| g.is_minority()).count() as f64 / labels.len() as f64
}

/// `(I_m, I_M)`: share of each group's out-edges that stay in the group.
pub fn in_group_ratios(snap: &Snapshot) -> (f64, f64) {
    // [source group][same group?]
    let mut counts = [[0u64; 2]; 2];
    for (i, j) in snap.edges() {
        let gi = snap.label(i);
        let row = usize::from(!gi.is_minority());
        counts[row][usize::from(gi == snap.label(j))] += 1;
    }
    let ratio = |c: [u64; 2]| {
        let total = c[0] + c[1];
        if total == 0 {
            0.0
        } else {
            c[1] as f64 / total as f64
        }
    };
    (ratio(counts[0]), ratio(counts[1]))
}
