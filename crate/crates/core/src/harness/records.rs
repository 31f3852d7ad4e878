//! Tidy per-step records: one CSV row per (run, step).

use std::collections::HashMap;
use std::path::Path;

use crate::error::{Error, Result};
use crate::simulation::StepRecord;
use crate::SCHEMA_VERSION;

pub const COLUMNS: [&str; 20] = [
    "schema_version",
    "run_id",
    "recommender",
    "h_mm",
    "h_MM",
    "f_m",
    "replicate",
    "seed",
    "step",
    "gini_in",
    "clustering",
    "visibility_m",
    "relative_visibility",
    "delta_visibility_so_far",
    "I_m",
    "I_M",
    "edges_added",
    "edges_removed",
    "skipped_nodes",
    "fallback_removals",
];

/// Format with 12 significant digits, `%g` style.
pub fn fmt_float(x: f64) -> String {
    if x == 0.0 {
        return "0".into();
    }
    if !x.is_finite() {
        return if x.is_nan() { "nan".into() } else if x > 0.0 { "inf".into() } else { "-inf".into() };
    }
    let sci = format!("{x:.11e}");
    let (mantissa, exp) = sci.split_once('e').expect("exponent");
    let exp: i32 = exp.parse().expect("integer exponent");
    let trim = |s: &str| -> String {
        if s.contains('.') {
            s.trim_end_matches('0').trim_end_matches('.').to_string()
        } else {
            s.to_string()
        }
    };
    if !(-5..12).contains(&exp) {
        format!("{}e{exp}", trim(mantissa))
    } else {
        trim(&format!("{x:.*}", (11 - exp) as usize))
    }
}

/// Identity of one simulation run inside a sweep.
#[derive(Debug, Clone, PartialEq)]
pub struct RunInfo {
    pub run_id: String,
    pub recommender: String,
    pub h_mm: f64,
    pub h_maj: f64,
    pub f_m: f64,
    pub replicate: usize,
    pub seed: u64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct TidyRecord {
    pub run_id: String,
    pub recommender: String,
    pub h_mm: f64,
    pub h_maj: f64,
    pub f_m: f64,
    pub replicate: usize,
    pub seed: u64,
    pub step: usize,
    pub gini_in: f64,
    pub clustering: f64,
    pub visibility_m: f64,
    pub relative_visibility: f64,
    pub delta_visibility_so_far: f64,
    pub inlink_ratio_m: f64,
    pub inlink_ratio_maj: f64,
    pub edges_added: usize,
    pub edges_removed: usize,
    pub skipped_nodes: usize,
    pub fallback_removals: usize,
}

impl TidyRecord {
    fn to_row(&self) -> Vec<String> {
        vec![
            SCHEMA_VERSION.to_string(),
            self.run_id.clone(),
            self.recommender.clone(),
            fmt_float(self.h_mm),
            fmt_float(self.h_maj),
            fmt_float(self.f_m),
            self.replicate.to_string(),
            self.seed.to_string(),
            self.step.to_string(),
            fmt_float(self.gini_in),
            fmt_float(self.clustering),
            fmt_float(self.visibility_m),
            fmt_float(self.relative_visibility),
            fmt_float(self.delta_visibility_so_far),
            fmt_float(self.inlink_ratio_m),
            fmt_float(self.inlink_ratio_maj),
            self.edges_added.to_string(),
            self.edges_removed.to_string(),
            self.skipped_nodes.to_string(),
            self.fallback_removals.to_string(),
        ]
    }
}

/// One row per step record; visibility deltas are relative to step 0.
pub fn tidy_rows(info: &RunInfo, steps: &[StepRecord]) -> Vec<TidyRecord> {
    let base = steps.first().map_or(0.0, |s| s.metrics.visibility_m);
    steps
        .iter()
        .map(|s| TidyRecord {
            run_id: info.run_id.clone(),
            recommender: info.recommender.clone(),
            h_mm: info.h_mm,
            h_maj: info.h_maj,
            f_m: info.f_m,
            replicate: info.replicate,
            seed: info.seed,
            step: s.step,
            gini_in: s.metrics.gini_in,
            clustering: s.metrics.clustering,
            visibility_m: s.metrics.visibility_m,
            relative_visibility: s.metrics.relative_visibility,
            delta_visibility_so_far: s.metrics.visibility_m - base,
            inlink_ratio_m: s.metrics.inlink_ratio_m,
            inlink_ratio_maj: s.metrics.inlink_ratio_maj,
            edges_added: s.edges_added,
            edges_removed: s.edges_removed,
            skipped_nodes: s.skipped_nodes,
            fallback_removals: s.fallback_removals,
        })
        .collect()
}

pub fn write_records(path: impl AsRef<Path>, records: &[TidyRecord]) -> Result<()> {
    let path = path.as_ref();
    let mut w = csv::Writer::from_path(path).map_err(|e| csv_io(path, e))?;
    w.write_record(COLUMNS)?;
    for r in records {
        w.write_record(r.to_row())?;
    }
    w.flush().map_err(|e| Error::io(path, e))
}

fn csv_io(path: &Path, e: csv::Error) -> Error {
    match e.into_kind() {
        csv::ErrorKind::Io(io) => Error::io(path, io),
        other => Error::Parse {
            path: path.to_path_buf(),
            line: 0,
            msg: format!("{other:?}"),
        },
    }
}

/// Raw records file: header plus string cells, looked up by column name.
#[derive(Debug, Clone)]
pub struct RecordTable {
    path: std::path::PathBuf,
    columns: HashMap<String, usize>,
    rows: Vec<csv::StringRecord>,
}

impl RecordTable {
    pub fn read(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let mut rdr = csv::Reader::from_path(path).map_err(|e| csv_io(path, e))?;
        let columns = rdr
            .headers()?
            .iter()
            .enumerate()
            .map(|(k, h)| (h.to_string(), k))
            .collect();
        let rows = rdr.records().collect::<std::result::Result<Vec<_>, _>>()?;
        let table = RecordTable {
            path: path.to_path_buf(),
            columns,
            rows,
        };
        if let Some(&k) = table.columns.get("schema_version") {
            for r in &table.rows {
                if r.get(k) != Some(SCHEMA_VERSION.to_string().as_str()) {
                    return Err(Error::Config(format!(
                        "{}: unsupported schema_version {:?} (expected {SCHEMA_VERSION})",
                        path.display(),
                        r.get(k).unwrap_or("")
                    )));
                }
            }
        }
        Ok(table)
    }

    pub fn len(&self) -> usize {
        self.rows.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rows.is_empty()
    }

    /// Column indices for `names`, or a schema error listing the missing ones.
    pub fn require(&self, names: &[&str]) -> Result<Vec<usize>> {
        let missing: Vec<String> = names
            .iter()
            .filter(|n| !self.columns.contains_key(**n))
            .map(|n| n.to_string())
            .collect();
        if !missing.is_empty() {
            return Err(Error::Schema { missing });
        }
        Ok(names.iter().map(|n| self.columns[*n]).collect())
    }

    pub fn rows(&self) -> &[csv::StringRecord] {
        &self.rows
    }

    pub fn parse<T: std::str::FromStr>(&self, row: usize, col: usize) -> Result<T> {
        let cell = self.rows[row].get(col).unwrap_or("");
        cell.parse().map_err(|_| Error::Parse {
            path: self.path.clone(),
            line: row + 2,
            msg: format!("cannot parse {cell:?} in column {col}"),
        })
    }

    pub fn text(&self, row: usize, col: usize) -> &str {
        self.rows[row].get(col).unwrap_or("")
    }

    pub fn to_records(&self) -> Result<Vec<TidyRecord>> {
        let c = self.require(&COLUMNS)?;
        (0..self.len())
            .map(|r| {
                Ok(TidyRecord {
                    run_id: self.text(r, c[1]).to_string(),
                    recommender: self.text(r, c[2]).to_string(),
                    h_mm: self.parse(r, c[3])?,
                    h_maj: self.parse(r, c[4])?,
                    f_m: self.parse(r, c[5])?,
                    replicate: self.parse(r, c[6])?,
                    seed: self.parse(r, c[7])?,
                    step: self.parse(r, c[8])?,
                    gini_in: self.parse(r, c[9])?,
                    clustering: self.parse(r, c[10])?,
                    visibility_m: self.parse(r, c[11])?,
                    relative_visibility: self.parse(r, c[12])?,
                    delta_visibility_so_far: self.parse(r, c[13])?,
                    inlink_ratio_m: self.parse(r, c[14])?,
                    inlink_ratio_maj: self.parse(r, c[15])?,
                    edges_added: self.parse(r, c[16])?,
                    edges_removed: self.parse(r, c[17])?,
                    skipped_nodes: self.parse(r, c[18])?,
                    fallback_removals: self.parse(r, c[19])?,
                })
            })
            .collect()
    }
}

pub fn read_records(path: impl AsRef<Path>) -> Result<Vec<TidyRecord>> {
    RecordTable::read(path)?.to_records()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn float_format_matches_percent_g() {
        assert_eq!(fmt_float(0.0), "0");
        assert_eq!(fmt_float(0.3), "0.3");
        assert_eq!(fmt_float(1.0), "1");
        assert_eq!(fmt_float(-0.2), "-0.2");
        assert_eq!(fmt_float(2.0 / 3.0), "0.666666666667");
        assert_eq!(fmt_float(123456.789), "123456.789");
        assert_eq!(fmt_float(1.5e-7), "1.5e-7");
        assert_eq!(fmt_float(0.0001), "0.0001");
        assert_eq!(fmt_float(1e15), "1e15");
        assert_eq!(fmt_float(f64::NAN), "nan");
        assert_eq!(fmt_float(0.30000000000000004), "0.3");
    }

    #[test]
    fn records_round_trip_through_csv() {
        let rec = TidyRecord {
            run_id: "ppr_r0".into(),
            recommender: "ppr".into(),
            h_mm: 0.2,
            h_maj: 0.8,
            f_m: 0.3,
            replicate: 1,
            seed: u64::MAX,
            step: 4,
            gini_in: 0.4,
            clustering: 0.05,
            visibility_m: 0.25,
            relative_visibility: -0.05,
            delta_visibility_so_far: -0.01,
            inlink_ratio_m: 0.5,
            inlink_ratio_maj: 0.75,
            edges_added: 10,
            edges_removed: 10,
            skipped_nodes: 2,
            fallback_removals: 0,
        };
        let dir = tempfile::tempdir().unwrap();
        let p = dir.path().join("r.csv");
        write_records(&p, &[rec.clone()]).unwrap();
        assert_eq!(read_records(&p).unwrap(), vec![rec]);
    }

    #[test]
    fn missing_columns_are_named() {
        let dir = tempfile::tempdir().unwrap();
        let p = dir.path().join("r.csv");
        std::fs::write(&p, "run_id,step\nx,0\n").unwrap();
        match read_records(&p) {
            Err(Error::Schema { missing }) => {
                assert!(missing.contains(&"gini_in".to_string()));
                assert!(!missing.contains(&"step".to_string()));
            }
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn foreign_schema_version_is_refused() {
        let dir = tempfile::tempdir().unwrap();
        let p = dir.path().join("r.csv");
        std::fs::write(&p, "schema_version,step\n99,0\n").unwrap();
        assert!(matches!(RecordTable::read(&p), Err(Error::Config(_))));
    }
}
