//! Plot-ready tables reshaped from tidy records, one layout per figure kind.

use std::collections::BTreeMap;
use std::fmt;
use std::path::Path;
use std::str::FromStr;

use super::records::{fmt_float, RecordTable};
use super::summary::Stat;
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Figure {
    /// Mean Gini and clustering per step.
    Structure,
    /// Final delta visibility, one row per run.
    Violins,
    /// Mean final delta visibility per homophily cell.
    Heatmap,
    /// Mean final delta visibility against minority size.
    FmLines,
    /// Mean in-group link ratios per step.
    Ingroup,
}

impl Figure {
    pub const NAMES: [&'static str; 5] = ["structure", "violins", "heatmap", "fm_lines", "ingroup"];

    pub fn name(self) -> &'static str {
        match self {
            Figure::Structure => "structure",
            Figure::Violins => "violins",
            Figure::Heatmap => "heatmap",
            Figure::FmLines => "fm_lines",
            Figure::Ingroup => "ingroup",
        }
    }

    pub fn header(self) -> &'static [&'static str] {
        match self {
            Figure::Structure => &[
                "recommender",
                "network_type",
                "h_mm",
                "h_MM",
                "f_m",
                "step",
                "mean_gini",
                "mean_clustering",
                "runs",
            ],
            Figure::Violins => &[
                "recommender",
                "network_type",
                "h_mm",
                "h_MM",
                "f_m",
                "replicate",
                "delta_visibility",
            ],
            Figure::Heatmap => &[
                "recommender",
                "f_m",
                "h_mm",
                "h_MM",
                "mean_delta_visibility",
                "std_delta_visibility",
                "runs",
            ],
            Figure::FmLines => &[
                "recommender",
                "h_mm",
                "h_MM",
                "f_m",
                "mean_delta_visibility",
                "std_delta_visibility",
                "mean_relative_visibility",
                "runs",
            ],
            Figure::Ingroup => &["recommender", "network_type", "h_mm", "h_MM", "f_m", "step", "mean_I_m", "mean_I_M", "runs"],
        }
    }

    /// Record columns this figure reads.
    pub fn required_columns(self) -> &'static [&'static str] {
        match self {
            Figure::Structure => &["recommender", "h_mm", "h_MM", "f_m", "step", "gini_in", "clustering"],
            Figure::Violins => &["run_id", "recommender", "h_mm", "h_MM", "f_m", "replicate", "step", "delta_visibility_so_far"],
            Figure::Heatmap | Figure::FmLines => &[
                "run_id",
                "recommender",
                "h_mm",
                "h_MM",
                "f_m",
                "step",
                "delta_visibility_so_far",
                "relative_visibility",
            ],
            Figure::Ingroup => &["recommender", "h_mm", "h_MM", "f_m", "step", "I_m", "I_M"],
        }
    }
}

impl fmt::Display for Figure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Figure {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "structure" => Ok(Figure::Structure),
            "violins" => Ok(Figure::Violins),
            "heatmap" => Ok(Figure::Heatmap),
            "fm_lines" => Ok(Figure::FmLines),
            "ingroup" => Ok(Figure::Ingroup),
            other => Err(Error::InvalidArgument(format!(
                "unknown figure {other:?}; expected one of {}",
                Figure::NAMES.join(", ")
            ))),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Table {
    pub header: Vec<String>,
    pub rows: Vec<Vec<String>>,
}

impl Table {
    pub fn column(&self, name: &str) -> Option<usize> {
        self.header.iter().position(|h| h == name)
    }

    pub fn write_to<W: std::io::Write>(&self, w: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(w);
        w.write_record(&self.header)?;
        for r in &self.rows {
            w.write_record(r)?;
        }
        w.flush().map_err(|e| Error::io("<output>", e))
    }

    pub fn write(&self, path: impl AsRef<Path>) -> Result<()> {
        let path = path.as_ref();
        let f = std::fs::File::create(path).map_err(|e| Error::io(path, e))?;
        self.write_to(std::io::BufWriter::new(f))
    }
}

/// Label for a network's homophily/minority configuration.
pub fn network_type(h_mm: f64, h_maj: f64, f_m: f64) -> String {
    format!("hmm={} hMM={} fm={}", fmt_float(h_mm), fmt_float(h_maj), fmt_float(f_m))
}

// Float keys are ordered numerically but compared at a fixed resolution so
// that "0.1" and 0.1 + tiny noise fall into one group.
type Coord = i64;

fn coord(x: f64) -> Coord {
    (x * 1e9).round() as Coord
}

#[derive(Default)]
struct Acc {
    first: [f64; 3],
    values: Vec<[f64; 2]>,
}

impl Acc {
    fn push(&mut self, coords: [f64; 3], v: [f64; 2]) {
        self.first = coords;
        self.values.push(v);
    }

    fn stat(&self, k: usize) -> Stat {
        Stat::of(&self.values.iter().map(|v| v[k]).collect::<Vec<_>>())
    }
}

pub fn extract(table: &RecordTable, figure: Figure) -> Result<Table> {
    let c = table.require(figure.required_columns())?;
    let header: Vec<String> = figure.header().iter().map(|s| s.to_string()).collect();
    let f = |row: usize, col: usize| -> Result<f64> { table.parse::<f64>(row, c[col]) };
    let mut rows = Vec::new();
    match figure {
        Figure::Structure | Figure::Ingroup => {
            // columns: recommender, h_mm, h_MM, f_m, step, a, b
            let mut groups: BTreeMap<(String, Coord, Coord, Coord, usize), Acc> = BTreeMap::new();
            for r in 0..table.len() {
                let (h_mm, h_maj, f_m) = (f(r, 1)?, f(r, 2)?, f(r, 3)?);
                let step: usize = table.parse(r, c[4])?;
                let key = (table.text(r, c[0]).to_string(), coord(f_m), coord(h_mm), coord(h_maj), step);
                groups.entry(key).or_default().push([h_mm, h_maj, f_m], [f(r, 5)?, f(r, 6)?]);
            }
            for ((rec, _, _, _, step), acc) in groups {
                let [h_mm, h_maj, f_m] = acc.first;
                rows.push(vec![
                    rec,
                    network_type(h_mm, h_maj, f_m),
                    fmt_float(h_mm),
                    fmt_float(h_maj),
                    fmt_float(f_m),
                    step.to_string(),
                    fmt_float(acc.stat(0).mean),
                    fmt_float(acc.stat(1).mean),
                    acc.values.len().to_string(),
                ]);
            }
        }
        Figure::Violins | Figure::Heatmap | Figure::FmLines => {
            // Final row of each run.
            let mut last: BTreeMap<&str, (usize, usize)> = BTreeMap::new();
            for r in 0..table.len() {
                let step_col = if figure == Figure::Violins { 6 } else { 5 };
                let step: usize = table.parse(r, c[step_col])?;
                let e = last.entry(table.text(r, c[0])).or_insert((step, r));
                if step >= e.0 {
                    *e = (step, r);
                }
            }
            if figure == Figure::Violins {
                let mut out: Vec<(String, Coord, Coord, Coord, usize, Vec<String>)> = Vec::new();
                for &(_, r) in last.values() {
                    let (h_mm, h_maj, f_m) = (f(r, 2)?, f(r, 3)?, f(r, 4)?);
                    let rep: usize = table.parse(r, c[5])?;
                    let rec = table.text(r, c[1]).to_string();
                    let row = vec![
                        rec.clone(),
                        network_type(h_mm, h_maj, f_m),
                        fmt_float(h_mm),
                        fmt_float(h_maj),
                        fmt_float(f_m),
                        rep.to_string(),
                        fmt_float(f(r, 7)?),
                    ];
                    out.push((rec, coord(f_m), coord(h_mm), coord(h_maj), rep, row));
                }
                out.sort_by(|a, b| (&a.0, a.1, a.2, a.3, a.4).cmp(&(&b.0, b.1, b.2, b.3, b.4)));
                rows = out.into_iter().map(|t| t.5).collect();
            } else {
                let mut groups: BTreeMap<(String, Coord, Coord, Coord), Acc> = BTreeMap::new();
                for &(_, r) in last.values() {
                    let (h_mm, h_maj, f_m) = (f(r, 2)?, f(r, 3)?, f(r, 4)?);
                    let rec = table.text(r, c[1]).to_string();
                    let key = if figure == Figure::Heatmap {
                        (rec, coord(f_m), coord(h_mm), coord(h_maj))
                    } else {
                        (rec, coord(h_mm), coord(h_maj), coord(f_m))
                    };
                    groups.entry(key).or_default().push([h_mm, h_maj, f_m], [f(r, 6)?, f(r, 7)?]);
                }
                for ((rec, ..), acc) in groups {
                    let [h_mm, h_maj, f_m] = acc.first;
                    let d = acc.stat(0);
                    let n = acc.values.len().to_string();
                    rows.push(if figure == Figure::Heatmap {
                        vec![rec, fmt_float(f_m), fmt_float(h_mm), fmt_float(h_maj), fmt_float(d.mean), fmt_float(d.std), n]
                    } else {
                        vec![
                            rec,
                            fmt_float(h_mm),
                            fmt_float(h_maj),
                            fmt_float(f_m),
                            fmt_float(d.mean),
                            fmt_float(d.std),
                            fmt_float(acc.stat(1).mean),
                            n,
                        ]
                    });
                }
            }
        }
    }
    Ok(Table { header, rows })
}
