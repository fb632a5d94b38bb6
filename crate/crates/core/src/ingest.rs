//! Hypergraphs from tabular data, and the hMETIS-style text format.
//!
//! Every (feature column, value) pair becomes a unit-weight hyperedge over
//! the rows holding that value. Numeric columns are binned first. Edges are
//! ordered by column, then by first occurrence of the value.

use std::collections::HashMap;
use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::hypergraph::Hypergraph;
use crate::learning::LabelSet;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ColumnKind {
    Categorical,
    Numeric { bins: usize },
    Label,
    Ignore,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Binning {
    /// `bins` intervals of equal width over `[min, max]`, last one closed.
    #[default]
    EqualWidth,
    /// Bins by rank, tied values kept together.
    EqualFrequency,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ColumnSpec {
    pub name: String,
    pub kind: ColumnKind,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TableSchema {
    pub columns: Vec<ColumnSpec>,
    pub binning: Binning,
}

pub const DEFAULT_BINS: usize = 10;

impl TableSchema {
    /// Every column categorical.
    pub fn categorical(header: &[String]) -> Self {
        TableSchema {
            columns: header
                .iter()
                .map(|name| ColumnSpec {
                    name: name.clone(),
                    kind: ColumnKind::Categorical,
                })
                .collect(),
            binning: Binning::EqualWidth,
        }
    }

    /// Sets the kind of the column called `name`.
    pub fn set_kind(&mut self, name: &str, kind: ColumnKind) -> Result<()> {
        let col = self
            .columns
            .iter_mut()
            .find(|c| c.name == name)
            .ok_or_else(|| Error::InvalidArgument(format!("no column named {name:?}")))?;
        col.kind = kind;
        Ok(())
    }

    pub fn validate(&self) -> Result<()> {
        let labels = self.columns.iter().filter(|c| c.kind == ColumnKind::Label).count();
        if labels > 1 {
            return Err(Error::InvalidArgument("at most one label column".into()));
        }
        for c in &self.columns {
            if let ColumnKind::Numeric { bins } = c.kind {
                if bins < 2 {
                    return Err(Error::InvalidArgument(format!(
                        "column {:?} needs at least 2 bins",
                        c.name
                    )));
                }
            }
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct FeatureEdges {
    pub column: String,
    pub edges: usize,
    pub dropped_singletons: usize,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct IngestReport {
    pub n_vertices: usize,
    pub n_edges: usize,
    pub sum_edge_cardinality: usize,
    pub dropped_singletons: usize,
    pub features: Vec<FeatureEdges>,
}

/// Cells treated as missing; they form their own category.
pub fn is_missing(cell: &str) -> bool {
    matches!(cell.trim(), "" | "?" | "NA" | "NaN" | "nan")
}

const MISSING: &str = "\u{0}missing";

/// Builds the hypergraph, the label set (rows with a missing label stay
/// unlabelled) and a summary.
pub fn hypergraph_from_table(
    rows: &[Vec<String>],
    schema: &TableSchema,
    drop_singletons: bool,
) -> Result<(Hypergraph, LabelSet, IngestReport)> {
    schema.validate()?;
    let width = schema.columns.len();
    for (r, row) in rows.iter().enumerate() {
        if row.len() != width {
            return Err(Error::Parse {
                line: r + 2,
                msg: format!("expected {width} fields, found {}", row.len()),
            });
        }
    }
    let n = rows.len();
    let mut edges: Vec<(f64, Vec<usize>)> = Vec::new();
    let mut features = Vec::new();
    let mut dropped = 0;
    let mut named_labels = Vec::new();
    for (c, col) in schema.columns.iter().enumerate() {
        let keys: Vec<String> = match col.kind {
            ColumnKind::Ignore => continue,
            ColumnKind::Label => {
                for (r, row) in rows.iter().enumerate() {
                    if !is_missing(&row[c]) {
                        named_labels.push((r, row[c].trim().to_string()));
                    }
                }
                continue;
            }
            ColumnKind::Categorical => rows
                .iter()
                .map(|row| {
                    if is_missing(&row[c]) {
                        MISSING.to_string()
                    } else {
                        row[c].trim().to_string()
                    }
                })
                .collect(),
            ColumnKind::Numeric { bins } => {
                let mut parsed = Vec::with_capacity(n);
                for (r, row) in rows.iter().enumerate() {
                    if is_missing(&row[c]) {
                        parsed.push(None);
                        continue;
                    }
                    let x: f64 = row[c].trim().parse().map_err(|_| Error::Parse {
                        line: r + 2,
                        msg: format!("column {:?}: {:?} is not numeric", col.name, row[c]),
                    })?;
                    if !x.is_finite() {
                        return Err(Error::Parse {
                            line: r + 2,
                            msg: format!("column {:?}: non-finite value", col.name),
                        });
                    }
                    parsed.push(Some(x));
                }
                let idx = bin_indices(&parsed, bins, schema.binning);
                idx.iter()
                    .map(|b| match b {
                        Some(b) => b.to_string(),
                        None => MISSING.to_string(),
                    })
                    .collect()
            }
        };
        let groups = group_by_first_occurrence(&keys);
        let mut kept = 0;
        let mut col_dropped = 0;
        for members in groups {
            if drop_singletons && members.len() == 1 {
                col_dropped += 1;
                continue;
            }
            kept += 1;
            edges.push((1.0, members));
        }
        dropped += col_dropped;
        features.push(FeatureEdges {
            column: col.name.clone(),
            edges: kept,
            dropped_singletons: col_dropped,
        });
    }
    let h = Hypergraph::new(n, edges)?;
    let labels = LabelSet::from_named(n, &named_labels)?;
    let report = IngestReport {
        n_vertices: n,
        n_edges: h.n_edges(),
        sum_edge_cardinality: h.total_cardinality(),
        dropped_singletons: dropped,
        features,
    };
    Ok((h, labels, report))
}

/// Row groups per distinct key, in order of first occurrence.
fn group_by_first_occurrence(keys: &[String]) -> Vec<Vec<usize>> {
    let mut index: HashMap<&str, usize> = HashMap::new();
    let mut groups: Vec<Vec<usize>> = Vec::new();
    for (r, k) in keys.iter().enumerate() {
        let g = *index.entry(k.as_str()).or_insert_with(|| {
            groups.push(Vec::new());
            groups.len() - 1
        });
        groups[g].push(r);
    }
    groups
}

/// Bin index per value; `None` stays `None`.
pub fn bin_indices(values: &[Option<f64>], bins: usize, binning: Binning) -> Vec<Option<usize>> {
    let present: Vec<f64> = values.iter().flatten().copied().collect();
    if present.is_empty() {
        return vec![None; values.len()];
    }
    match binning {
        Binning::EqualWidth => {
            let lo = present.iter().copied().fold(f64::INFINITY, f64::min);
            let hi = present.iter().copied().fold(f64::NEG_INFINITY, f64::max);
            values
                .iter()
                .map(|v| v.map(|x| equal_width_bin(x, lo, hi, bins)))
                .collect()
        }
        Binning::EqualFrequency => {
            let mut sorted = present.clone();
            sorted.sort_by(f64::total_cmp);
            let m = sorted.len();
            values
                .iter()
                .map(|v| {
                    v.map(|x| {
                        let below = sorted.partition_point(|&s| s < x);
                        (below * bins / m).min(bins - 1)
                    })
                })
                .collect()
        }
    }
}

/// Index of `x` among `bins` equal-width intervals over `[lo, hi]`.
pub fn equal_width_bin(x: f64, lo: f64, hi: f64, bins: usize) -> usize {
    if hi <= lo {
        return 0;
    }
    let t = (x - lo) / (hi - lo) * bins as f64;
    (t.floor().max(0.0) as usize).min(bins - 1)
}

/// Reads a CSV file with a header row.
pub fn read_table<P: AsRef<Path>>(path: P) -> Result<(Vec<String>, Vec<Vec<String>>)> {
    let mut reader = csv::ReaderBuilder::new()
        .flexible(true)
        .trim(csv::Trim::All)
        .from_path(path)?;
    let header = reader.headers()?.iter().map(str::to_string).collect();
    let mut rows = Vec::new();
    for record in reader.records() {
        rows.push(record?.iter().map(str::to_string).collect());
    }
    Ok((header, rows))
}

/// Parses the text format: header `m n [fmt]`, then one line per edge.
/// With `fmt` 1 each line starts with the weight; with `fmt` absent or 0
/// edges have unit weight. Vertex ids are 1-based; `%` starts a comment.
pub fn parse_hgr(text: &str) -> Result<Hypergraph> {
    let mut lines = text
        .lines()
        .enumerate()
        .map(|(i, l)| (i + 1, l.trim()))
        .filter(|(_, l)| !l.is_empty() && !l.starts_with('%'));
    let (hline, header) = lines.next().ok_or(Error::Parse {
        line: 1,
        msg: "missing header".into(),
    })?;
    let fields: Vec<&str> = header.split_whitespace().collect();
    let bad_header = |msg: &str| Error::Parse {
        line: hline,
        msg: format!("{msg}: {header:?}"),
    };
    if fields.len() < 2 || fields.len() > 3 {
        return Err(bad_header("header must be `m n [fmt]`"));
    }
    let m: usize = fields[0].parse().map_err(|_| bad_header("bad edge count"))?;
    let n: usize = fields[1].parse().map_err(|_| bad_header("bad vertex count"))?;
    let weighted = match fields.get(2).copied() {
        None | Some("0") => false,
        Some("1") => true,
        Some(_) => return Err(bad_header("only formats 0 and 1 are supported")),
    };
    let mut edges = Vec::with_capacity(m);
    for (line, body) in lines {
        if edges.len() == m {
            return Err(Error::Parse {
                line,
                msg: format!("more than {m} edge lines"),
            });
        }
        let mut tokens = body.split_whitespace();
        let weight = if weighted {
            let tok = tokens.next().unwrap_or_default();
            let w: f64 = tok.parse().map_err(|_| Error::Parse {
                line,
                msg: format!("bad weight {tok:?}"),
            })?;
            if !w.is_finite() || w < 0.0 {
                return Err(Error::Parse {
                    line,
                    msg: format!("weight {w} must be finite and >= 0"),
                });
            }
            w
        } else {
            1.0
        };
        let mut verts = Vec::new();
        for tok in tokens {
            let id: usize = tok.parse().map_err(|_| Error::Parse {
                line,
                msg: format!("bad vertex id {tok:?}"),
            })?;
            if id == 0 || id > n {
                return Err(Error::Parse {
                    line,
                    msg: format!("vertex id {id} outside 1..={n}"),
                });
            }
            verts.push(id - 1);
        }
        if verts.is_empty() {
            return Err(Error::Parse {
                line,
                msg: "edge has no vertices".into(),
            });
        }
        edges.push((weight, verts));
    }
    if edges.len() != m {
        return Err(Error::Parse {
            line: text.lines().count(),
            msg: format!("header promises {m} edges, found {}", edges.len()),
        });
    }
    Hypergraph::new(n, edges)
}

/// Weighted text format with shortest round-trip weights, vertices sorted.
pub fn format_hgr(h: &Hypergraph) -> String {
    let mut out = format!("{} {} 1\n", h.n_edges(), h.n_vertices());
    for e in h.edges() {
        write!(out, "{}", e.weight).unwrap();
        for &v in &e.vertices {
            write!(out, " {}", v + 1).unwrap();
        }
        out.push('\n');
    }
    out
}

pub fn read_hgr<P: AsRef<Path>>(path: P) -> Result<Hypergraph> {
    parse_hgr(&fs::read_to_string(path)?)
}

pub fn write_hgr<P: AsRef<Path>>(h: &Hypergraph, path: P) -> Result<()> {
    fs::write(path, format_hgr(h))?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures;

    fn rows(cols: &[&[&str]]) -> Vec<Vec<String>> {
        cols.iter()
            .map(|r| r.iter().map(|s| s.to_string()).collect())
            .collect()
    }

    fn edge_sets(h: &Hypergraph) -> Vec<Vec<usize>> {
        h.edges().iter().map(|e| e.vertices.clone()).collect()
    }

    #[test]
    fn categorical_column() {
        let schema = TableSchema::categorical(&["c".to_string()]);
        let t = rows(&[&["a"], &["a"], &["b"]]);
        let (h, _, rep) = hypergraph_from_table(&t, &schema, false).unwrap();
        assert_eq!(edge_sets(&h), vec![vec![0, 1], vec![2]]);
        assert_eq!(rep.dropped_singletons, 0);
        let (h, _, rep) = hypergraph_from_table(&t, &schema, true).unwrap();
        assert_eq!(edge_sets(&h), vec![vec![0, 1]]);
        assert_eq!(rep.dropped_singletons, 1);
        assert_eq!(rep.n_edges + rep.dropped_singletons, 2);
    }

    #[test]
    fn numeric_equal_width() {
        let mut schema = TableSchema::categorical(&["x".to_string()]);
        schema.set_kind("x", ColumnKind::Numeric { bins: 2 }).unwrap();
        let t = rows(&[&["0"], &["0.5"], &["1"]]);
        let (h, _, _) = hypergraph_from_table(&t, &schema, false).unwrap();
        assert_eq!(edge_sets(&h), vec![vec![0], vec![1, 2]]);
    }

    #[test]
    fn constant_numeric_is_one_edge() {
        let mut schema = TableSchema::categorical(&["x".to_string()]);
        schema.set_kind("x", ColumnKind::Numeric { bins: 10 }).unwrap();
        let t = rows(&[&["3"], &["3"], &["3"]]);
        let (h, _, _) = hypergraph_from_table(&t, &schema, false).unwrap();
        assert_eq!(edge_sets(&h), vec![vec![0, 1, 2]]);
    }

    #[test]
    fn equal_frequency_keeps_ties() {
        let v: Vec<Option<f64>> = [1.0, 1.0, 1.0, 2.0, 3.0, 4.0].iter().map(|&x| Some(x)).collect();
        let b = bin_indices(&v, 2, Binning::EqualFrequency);
        assert_eq!(b, vec![Some(0), Some(0), Some(0), Some(1), Some(1), Some(1)]);
    }

    #[test]
    fn bins_are_exhaustive() {
        for bins in 2..12 {
            for k in 0..=100 {
                let x = k as f64 / 100.0 * 7.0 - 2.0;
                assert!(equal_width_bin(x, -2.0, 5.0, bins) < bins);
            }
            assert_eq!(equal_width_bin(5.0, -2.0, 5.0, bins), bins - 1);
            assert_eq!(equal_width_bin(-2.0, -2.0, 5.0, bins), 0);
        }
    }

    #[test]
    fn missing_values_and_labels() {
        let header: Vec<String> = ["a", "x", "y", "skip"].iter().map(|s| s.to_string()).collect();
        let mut schema = TableSchema::categorical(&header);
        schema.set_kind("x", ColumnKind::Numeric { bins: 3 }).unwrap();
        schema.set_kind("y", ColumnKind::Label).unwrap();
        schema.set_kind("skip", ColumnKind::Ignore).unwrap();
        let t = rows(&[
            &["u", "1", "p", "z"],
            &["?", "?", "q", "z"],
            &["u", "2", "?", "z"],
            &["", "3", "p", "z"],
        ]);
        let (h, labels, rep) = hypergraph_from_table(&t, &schema, false).unwrap();
        assert_eq!(
            edge_sets(&h),
            vec![vec![0, 2], vec![1, 3], vec![0], vec![1], vec![2], vec![3]]
        );
        assert_eq!(labels.pairs(), &[(0, 0), (1, 1), (3, 0)]);
        assert_eq!(rep.features.len(), 2);
        for v in 0..4 {
            assert_eq!(h.incidence_count(v), 2);
        }
    }

    #[test]
    fn rejects_bad_tables() {
        let schema = TableSchema::categorical(&["a".to_string(), "b".to_string()]);
        assert!(hypergraph_from_table(&rows(&[&["1"]]), &schema, false).is_err());
        let mut num = TableSchema::categorical(&["a".to_string()]);
        num.set_kind("a", ColumnKind::Numeric { bins: 4 }).unwrap();
        assert!(hypergraph_from_table(&rows(&[&["z"]]), &num, false).is_err());
        num.set_kind("a", ColumnKind::Numeric { bins: 1 }).unwrap();
        assert!(num.validate().is_err());
        let mut two = TableSchema::categorical(&["a".to_string(), "b".to_string()]);
        two.set_kind("a", ColumnKind::Label).unwrap();
        two.set_kind("b", ColumnKind::Label).unwrap();
        assert!(two.validate().is_err());
    }

    #[test]
    fn parses_running_example() {
        let h = parse_hgr("% comment\n2 4 1\n1 1 2 3\n2 3 4\n").unwrap();
        assert_eq!(h, fixtures::running_example());
    }

    #[test]
    fn unweighted_header() {
        let h = parse_hgr("1 3\n1 3\n").unwrap();
        assert_eq!(h.edges()[0].weight, 1.0);
        assert_eq!(h.edges()[0].vertices, vec![0, 2]);
    }

    #[test]
    fn hgr_errors() {
        assert!(parse_hgr("").is_err());
        assert!(parse_hgr("x 4 1\n").is_err());
        assert!(parse_hgr("1 4 11\n1 1 2\n").is_err());
        assert!(parse_hgr("1 4 1\n-1 1 2\n").is_err());
        assert!(parse_hgr("1 4 1\n1 1 5\n").is_err());
        assert!(parse_hgr("1 4 1\n1 0 2\n").is_err());
        assert!(parse_hgr("2 4 1\n1 1 2\n").is_err());
        assert!(parse_hgr("1 4 1\n1 1 2\n1 3 4\n").is_err());
    }

    #[test]
    fn round_trip_is_exact() {
        let h = Hypergraph::new(
            5,
            vec![(0.1 + 0.2, vec![4, 0]), (1e-300, vec![1, 2, 3]), (7.0, vec![2])],
        )
        .unwrap();
        assert_eq!(parse_hgr(&format_hgr(&h)).unwrap(), h);
    }
}
