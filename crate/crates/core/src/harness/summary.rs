//! Per-cell aggregates over replicates: how much each run moved between its
//! baseline (step 0) and its final step.

use std::collections::BTreeMap;

use serde::Serialize;

use super::records::TidyRecord;
use crate::rng::grid_coord;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CellKey {
    pub recommender: String,
    pub h_mm: f64,
    #[serde(rename = "h_MM")]
    pub h_maj: f64,
    pub f_m: f64,
}

impl CellKey {
    fn ord_key(&self) -> (String, u64, u64, u64) {
        (
            self.recommender.clone(),
            grid_coord(self.f_m),
            grid_coord(self.h_mm),
            grid_coord(self.h_maj),
        )
    }
}

/// Mean and population standard deviation.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Stat {
    pub mean: f64,
    pub std: f64,
}

impl Stat {
    pub fn of(values: &[f64]) -> Stat {
        if values.is_empty() {
            return Stat {
                mean: f64::NAN,
                std: f64::NAN,
            };
        }
        let n = values.len() as f64;
        let mean = values.iter().sum::<f64>() / n;
        let var = values.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / n;
        Stat { mean, std: var.sqrt() }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CellSummary {
    #[serde(flatten)]
    pub key: CellKey,
    pub replicates: usize,
    pub final_step: usize,
    pub delta_visibility: Stat,
    pub gini_change: Stat,
    pub clustering_change: Stat,
    pub inlink_ratio_m_final: Stat,
    #[serde(rename = "inlink_ratio_M_final")]
    pub inlink_ratio_maj_final: Stat,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Summary {
    pub cells: Vec<CellSummary>,
    /// Human-readable descriptions of missing cells or incomplete runs.
    pub gaps: Vec<String>,
}

struct RunEnds<'a> {
    first: &'a TidyRecord,
    last: &'a TidyRecord,
}

/// Aggregate runs by cell. With `expected`, cells absent from `records` are
/// reported as gaps.
pub fn summarize(records: &[TidyRecord], expected: Option<&[CellKey]>) -> Summary {
    let mut runs: BTreeMap<&str, Vec<&TidyRecord>> = BTreeMap::new();
    for r in records {
        runs.entry(r.run_id.as_str()).or_default().push(r);
    }
    let mut gaps = Vec::new();
    let mut cells: BTreeMap<(String, u64, u64, u64), (CellKey, Vec<RunEnds>)> = BTreeMap::new();
    for (run_id, rows) in runs {
        let first = rows.iter().find(|r| r.step == 0);
        let last = rows.iter().max_by_key(|r| r.step);
        let (Some(first), Some(last)) = (first, last) else {
            gaps.push(format!("run {run_id} has no step-0 baseline"));
            continue;
        };
        let key = CellKey {
            recommender: first.recommender.clone(),
            h_mm: first.h_mm,
            h_maj: first.h_maj,
            f_m: first.f_m,
        };
        cells
            .entry(key.ord_key())
            .or_insert_with(|| (key, Vec::new()))
            .1
            .push(RunEnds { first, last });
    }
    if let Some(expected) = expected {
        for key in expected {
            if !cells.contains_key(&key.ord_key()) {
                gaps.push(format!(
                    "no records for {} at h_mm={}, h_MM={}, f_m={}",
                    key.recommender, key.h_mm, key.h_maj, key.f_m
                ));
            }
        }
    }
    let cells = cells
        .into_values()
        .map(|(key, ends)| {
            let collect = |f: &dyn Fn(&RunEnds) -> f64| ends.iter().map(f).collect::<Vec<_>>();
            CellSummary {
                replicates: ends.len(),
                final_step: ends.iter().map(|e| e.last.step).max().unwrap_or(0),
                delta_visibility: Stat::of(&collect(&|e| e.last.visibility_m - e.first.visibility_m)),
                gini_change: Stat::of(&collect(&|e| e.last.gini_in - e.first.gini_in)),
                clustering_change: Stat::of(&collect(&|e| e.last.clustering - e.first.clustering)),
                inlink_ratio_m_final: Stat::of(&collect(&|e| e.last.inlink_ratio_m)),
                inlink_ratio_maj_final: Stat::of(&collect(&|e| e.last.inlink_ratio_maj)),
                key,
            }
        })
        .collect();
    Summary { cells, gaps }
}

#[cfg(test)]
mod tests {
    use super::*;

    pub(crate) fn row(run: &str, rep: usize, step: usize, vis: f64, gini: f64, clus: f64) -> TidyRecord {
        TidyRecord {
            run_id: run.into(),
            recommender: "ppr".into(),
            h_mm: 0.2,
            h_maj: 0.2,
            f_m: 0.3,
            replicate: rep,
            seed: 0,
            step,
            gini_in: gini,
            clustering: clus,
            visibility_m: vis,
            relative_visibility: vis - 0.3,
            delta_visibility_so_far: 0.0,
            inlink_ratio_m: 0.4,
            inlink_ratio_maj: 0.6,
            edges_added: 0,
            edges_removed: 0,
            skipped_nodes: 0,
            fallback_removals: 0,
        }
    }

    #[test]
    fn single_replicate_has_zero_spread() {
        let recs = vec![row("a", 0, 0, 0.3, 0.4, 0.1), row("a", 0, 30, 0.2, 0.5, 0.3)];
        let s = summarize(&recs, None);
        assert_eq!(s.cells.len(), 1);
        let c = &s.cells[0];
        assert!((c.delta_visibility.mean + 0.1).abs() < 1e-15);
        assert_eq!(c.delta_visibility.std, 0.0);
        assert_eq!(c.final_step, 30);
        assert!(s.gaps.is_empty());
    }

    #[test]
    fn three_row_fixture_matches_hand_arithmetic() {
        // Three replicates with delta visibility -0.1, 0.0, +0.1:
        // mean 0, population variance (0.01 + 0 + 0.01) / 3.
        let recs = vec![
            row("a", 0, 0, 0.4, 0.0, 0.0),
            row("a", 0, 1, 0.3, 0.3, 0.1),
            row("b", 1, 0, 0.4, 0.0, 0.0),
            row("b", 1, 1, 0.4, 0.6, 0.2),
            row("c", 2, 0, 0.4, 0.0, 0.0),
            row("c", 2, 1, 0.5, 0.9, 0.3),
        ];
        let c = &summarize(&recs, None).cells[0];
        assert_eq!(c.replicates, 3);
        assert!(c.delta_visibility.mean.abs() < 1e-15);
        assert!((c.delta_visibility.std - (0.02f64 / 3.0).sqrt()).abs() < 1e-15);
        assert!((c.gini_change.mean - 0.6).abs() < 1e-15);
        assert!((c.gini_change.std - (0.18f64 / 3.0).sqrt()).abs() < 1e-15);
        assert!((c.clustering_change.mean - 0.2).abs() < 1e-15);
    }

    #[test]
    fn gaps_are_reported() {
        let recs = vec![row("a", 0, 3, 0.3, 0.4, 0.1)];
        let expected = [CellKey {
            recommender: "wtf".into(),
            h_mm: 0.5,
            h_maj: 0.5,
            f_m: 0.3,
        }];
        let s = summarize(&recs, Some(&expected));
        assert!(s.cells.is_empty());
        assert_eq!(s.gaps.len(), 2, "{:?}", s.gaps);
    }
}
