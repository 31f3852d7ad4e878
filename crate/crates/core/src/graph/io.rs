//! Plain-text edge list.
//!
//! ```text
//! # n=<int> fm=<float>
//! # labels=<path>        (optional; one 0/1 per line, 1 = minority)
//! <source> <target>
//! ```
//!
//! Without a labels sidecar, node ids `0..round(n * fm)` are the minority.

use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use super::{prefix_labels, DirectedGraph, Group};
use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq)]
pub struct EdgeListHeader {
    pub n: usize,
    pub f_m: f64,
    pub labels: Option<PathBuf>,
}

fn parse_err(path: &Path, line: usize, msg: impl Into<String>) -> Error {
    Error::Parse {
        path: path.to_path_buf(),
        line,
        msg: msg.into(),
    }
}

fn parse_header(path: &Path, line_no: usize, body: &str, header: &mut Option<EdgeListHeader>) -> Result<()> {
    let mut n = None;
    let mut f_m = None;
    let mut labels = None;
    for tok in body.split_whitespace() {
        let Some((key, value)) = tok.split_once('=') else {
            continue;
        };
        match key {
            "n" => n = Some(value.parse::<usize>().map_err(|e| parse_err(path, line_no, format!("bad n: {e}")))?),
            "fm" => f_m = Some(value.parse::<f64>().map_err(|e| parse_err(path, line_no, format!("bad fm: {e}")))?),
            "labels" => labels = Some(PathBuf::from(value)),
            _ => {}
        }
    }
    match (n, f_m, header.as_mut()) {
        (Some(n), Some(f_m), None) => {
            if !(0.0..=1.0).contains(&f_m) {
                return Err(parse_err(path, line_no, format!("fm={f_m} outside [0, 1]")));
            }
            *header = Some(EdgeListHeader { n, f_m, labels });
        }
        (None, None, Some(h)) if labels.is_some() => h.labels = labels,
        (None, None, None) if labels.is_some() => {
            return Err(parse_err(path, line_no, "labels line before `# n=.. fm=..` header"))
        }
        (Some(_), _, Some(_)) | (_, Some(_), Some(_)) => return Err(parse_err(path, line_no, "duplicate header")),
        (Some(_), None, None) | (None, Some(_), None) => {
            return Err(parse_err(path, line_no, "header needs both n= and fm="))
        }
        _ => {}
    }
    Ok(())
}

fn read_labels(path: &Path, n: usize) -> Result<Vec<Group>> {
    let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    let labels: Vec<Group> = text
        .lines()
        .enumerate()
        .filter(|(_, l)| !l.trim().is_empty())
        .map(|(k, l)| match l.trim() {
            "1" => Ok(Group::Minority),
            "0" => Ok(Group::Majority),
            other => Err(parse_err(path, k + 1, format!("expected 0 or 1, got {other:?}"))),
        })
        .collect::<Result<_>>()?;
    if labels.len() != n {
        return Err(parse_err(path, labels.len(), format!("expected {n} labels, found {}", labels.len())));
    }
    Ok(labels)
}

pub fn read_edge_list(path: impl AsRef<Path>) -> Result<DirectedGraph> {
    let path = path.as_ref();
    let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    let mut header: Option<EdgeListHeader> = None;
    let mut edges = Vec::new();
    for (k, raw) in text.lines().enumerate() {
        let line_no = k + 1;
        let line = raw.trim();
        if line.is_empty() {
            continue;
        }
        if let Some(body) = line.strip_prefix('#') {
            parse_header(path, line_no, body, &mut header)?;
            continue;
        }
        let mut it = line.split_whitespace();
        let (Some(a), Some(b), None) = (it.next(), it.next(), it.next()) else {
            return Err(parse_err(path, line_no, "expected `source target`"));
        };
        let i: usize = a.parse().map_err(|e| parse_err(path, line_no, format!("bad source {a:?}: {e}")))?;
        let j: usize = b.parse().map_err(|e| parse_err(path, line_no, format!("bad target {b:?}: {e}")))?;
        edges.push((line_no, i, j));
    }
    let header = header.ok_or_else(|| parse_err(path, 1, "missing `# n=<int> fm=<float>` header"))?;
    let labels = match &header.labels {
        Some(rel) => {
            let p = if rel.is_absolute() {
                rel.clone()
            } else {
                path.parent().unwrap_or(Path::new(".")).join(rel)
            };
            read_labels(&p, header.n)?
        }
        None => prefix_labels(header.n, header.f_m),
    };
    let mut g = DirectedGraph::new(labels);
    for (line_no, i, j) in edges {
        match g.add_edge(i, j) {
            Ok(true) => {}
            Ok(false) => return Err(parse_err(path, line_no, format!("duplicate edge {i} {j}"))),
            Err(e) => return Err(parse_err(path, line_no, e.to_string())),
        }
    }
    Ok(g)
}

/// Write `g` sorted by `(source, target)`. Labels that do not follow the
/// prefix rule go to a `<file>.labels` sidecar next to the edge list.
pub fn write_edge_list(path: impl AsRef<Path>, g: &DirectedGraph) -> Result<()> {
    let path = path.as_ref();
    let n = g.node_count();
    let f_m = g.minority_fraction();
    let mut out = String::with_capacity(16 * g.edge_count() + 64);
    writeln!(out, "# n={n} fm={f_m}").unwrap();
    if g.labels() != prefix_labels(n, f_m).as_slice() {
        let name = format!(
            "{}.labels",
            path.file_name().map(|s| s.to_string_lossy().into_owned()).unwrap_or_default()
        );
        let sidecar = path.with_file_name(&name);
        let body: String = g
            .labels()
            .iter()
            .map(|l| if l.is_minority() { "1\n" } else { "0\n" })
            .collect();
        fs::write(&sidecar, body).map_err(|e| Error::io(&sidecar, e))?;
        writeln!(out, "# labels={name}").unwrap();
    }
    for (i, j) in g.sorted_edges() {
        writeln!(out, "{i} {j}").unwrap();
    }
    fs::write(path, out).map_err(|e| Error::io(path, e))
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn reads_header_and_edges() {
        let dir = tempfile::tempdir().unwrap();
        let p = dir.path().join("g.edges");
        fs::write(&p, "# n=5 fm=0.4\n0 1\n1 2\n\n4 0\n").unwrap();
        let g = read_edge_list(&p).unwrap();
        assert_eq!(g.node_count(), 5);
        assert_eq!(g.edge_count(), 3);
        assert_eq!(g.group_counts(), (2, 3));
    }

    #[test]
    fn rejects_malformed_input() {
        let dir = tempfile::tempdir().unwrap();
        let p = dir.path().join("g.edges");
        fs::write(&p, "0 1\n").unwrap();
        assert!(matches!(read_edge_list(&p), Err(Error::Parse { .. })));
        fs::write(&p, "# n=3 fm=0.0\n0 0\n").unwrap();
        assert!(matches!(read_edge_list(&p), Err(Error::Parse { line: 2, .. })));
        fs::write(&p, "# n=3 fm=0.0\n0 1\n0 1\n").unwrap();
        assert!(read_edge_list(&p).is_err());
        fs::write(&p, "# n=3 fm=0.0\n0 7\n").unwrap();
        assert!(read_edge_list(&p).is_err());
    }

    #[test]
    fn custom_labels_go_through_sidecar() {
        let dir = tempfile::tempdir().unwrap();
        let p = dir.path().join("g.edges");
        let labels = vec![Group::Majority, Group::Minority, Group::Majority];
        let g = DirectedGraph::from_edges(labels, [(0, 1), (2, 1)]).unwrap();
        write_edge_list(&p, &g).unwrap();
        assert!(dir.path().join("g.edges.labels").exists());
        assert_eq!(read_edge_list(&p).unwrap(), g);
    }

    proptest! {
        #[test]
        fn round_trip_is_identity(n in 2usize..30, fm in 0.0f64..=1.0, raw in prop::collection::vec((0usize..30, 0usize..30), 0..120)) {
            let mut g = DirectedGraph::with_minority_fraction(n, fm);
            for (i, j) in raw {
                let (i, j) = (i % n, j % n);
                if i != j {
                    g.add_edge(i, j).unwrap();
                }
            }
            let dir = tempfile::tempdir().unwrap();
            let p = dir.path().join("rt.edges");
            write_edge_list(&p, &g).unwrap();
            prop_assert_eq!(read_edge_list(&p).unwrap(), g);
        }
    }
}
