//! Readers and writers for every on-disk artifact.
//!
//! Edge lists are `src<TAB>dst` lines with `#` comments; a `# vertices N`
//! comment records the vertex count so isolated vertices survive a round
//! trip. Everything else is CSV with a header, except point files whose
//! header is optional.

use std::fs::{self, File};
use std::io::{BufRead, BufReader, BufWriter, Write};
use std::path::Path;

use mcpc_core::centrality::{Ranking, ScoreVector};
use mcpc_core::embed::PointMatrix;
use mcpc_core::{DirectedGraph, GroundTruth};
use serde::{Deserialize, Serialize};

use crate::error::{CliError, Result};

const VERTEX_COUNT_TAG: &str = "vertices";

fn create(path: &Path) -> Result<BufWriter<File>> {
    if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
        fs::create_dir_all(dir).map_err(|e| CliError::io(dir, e))?;
    }
    File::create(path)
        .map(BufWriter::new)
        .map_err(|e| CliError::io(path, e))
}

fn open(path: &Path) -> Result<File> {
    File::open(path).map_err(|e| CliError::io(path, e))
}

fn csv_writer(path: &Path) -> Result<csv::Writer<BufWriter<File>>> {
    Ok(csv::Writer::from_writer(create(path)?))
}

fn csv_reader(path: &Path, has_headers: bool) -> Result<csv::Reader<File>> {
    Ok(csv::ReaderBuilder::new()
        .has_headers(has_headers)
        .trim(csv::Trim::All)
        .from_reader(open(path)?))
}

fn parse_cell<T: std::str::FromStr>(path: &Path, row: usize, column: usize, cell: &str) -> Result<T>
where
    T::Err: std::fmt::Display,
{
    cell.parse().map_err(|e: T::Err| CliError::Parse {
        path: path.into(),
        row,
        column,
        message: format!("cannot parse {cell:?}: {e}"),
    })
}

pub fn write_edge_list(path: &Path, graph: &DirectedGraph) -> Result<()> {
    let mut w = create(path)?;
    let io_err = |e| CliError::io(path, e);
    writeln!(w, "# {VERTEX_COUNT_TAG} {}", graph.num_vertices()).map_err(io_err)?;
    for (s, t) in graph.edges() {
        writeln!(w, "{s}\t{t}").map_err(io_err)?;
    }
    w.flush().map_err(io_err)
}

/// Reads an edge list. The vertex count is the largest of the recorded
/// count, `min_vertices`, and one past the largest index seen.
pub fn read_edge_list(path: &Path, min_vertices: Option<usize>) -> Result<DirectedGraph> {
    let reader = BufReader::new(open(path)?);
    let mut declared = None;
    let mut edges = Vec::new();
    for (i, line) in reader.lines().enumerate() {
        let row = i + 1;
        let line = line.map_err(|e| CliError::io(path, e))?;
        let line = line.trim();
        if line.is_empty() {
            continue;
        }
        if let Some(comment) = line.strip_prefix('#') {
            let mut words = comment.split_whitespace();
            if words.next() == Some(VERTEX_COUNT_TAG) {
                if let Some(n) = words.next() {
                    declared = Some(parse_cell::<usize>(path, row, 2, n)?);
                }
            }
            continue;
        }
        let fields: Vec<&str> = line.split_whitespace().collect();
        if fields.len() != 2 {
            return Err(CliError::Shape {
                path: path.into(),
                row,
                found: fields.len(),
                expected: 2,
            });
        }
        let s: usize = parse_cell(path, row, 1, fields[0])?;
        let t: usize = parse_cell(path, row, 2, fields[1])?;
        edges.push((s, t));
    }
    let seen = edges.iter().map(|&(s, t)| s.max(t) + 1).max().unwrap_or(0);
    let n = match declared {
        Some(d) => d.max(min_vertices.unwrap_or(0)),
        None => seen.max(min_vertices.unwrap_or(0)),
    };
    Ok(DirectedGraph::from_edges(n, &edges)?)
}

pub fn write_labels(path: &Path, truth: &GroundTruth) -> Result<()> {
    let mut w = csv_writer(path)?;
    let csv_err = |e| CliError::csv(path, e);
    w.write_record(["vertex", "community", "is_core"]).map_err(csv_err)?;
    for v in 0..truth.len() {
        let core = match truth.core_flags() {
            Some(f) => if f[v] { "1" } else { "0" },
            None => "",
        };
        w.write_record([v.to_string(), truth.community(v).to_string(), core.to_string()])
            .map_err(csv_err)?;
    }
    w.flush().map_err(|e| CliError::io(path, e))
}

/// Reads `vertex,community,is_core`. Rows may come in any order but must
/// cover vertices `0..n` exactly once. Integer community labels forming
/// `0..z` are kept as is; anything else is renumbered by first appearance
/// in vertex order. The core column must be filled for all rows or none.
pub fn read_labels(path: &Path, expected_vertices: Option<usize>) -> Result<GroundTruth> {
    let mut reader = csv_reader(path, true)?;
    let mut rows: Vec<(usize, String, Option<bool>)> = Vec::new();
    for (i, record) in reader.records().enumerate() {
        let row = i + 2;
        let record = record.map_err(|e| CliError::csv(path, e))?;
        if record.len() < 2 || record.len() > 3 {
            return Err(CliError::Shape {
                path: path.into(),
                row,
                found: record.len(),
                expected: 3,
            });
        }
        let vertex: usize = parse_cell(path, row, 1, &record[0])?;
        let community = record[1].to_string();
        if community.is_empty() {
            return Err(CliError::Parse {
                path: path.into(),
                row,
                column: 2,
                message: "empty community label".into(),
            });
        }
        let core = match record.get(2).unwrap_or("") {
            "" => None,
            "1" | "true" => Some(true),
            "0" | "false" => Some(false),
            other => {
                return Err(CliError::Parse {
                    path: path.into(),
                    row,
                    column: 3,
                    message: format!("expected 0/1 or true/false, found {other:?}"),
                })
            }
        };
        rows.push((vertex, community, core));
    }
    let n = expected_vertices.unwrap_or_else(|| rows.iter().map(|r| r.0 + 1).max().unwrap_or(0));
    let mut slots: Vec<Option<(String, Option<bool>)>> = vec![None; n];
    for (i, (vertex, community, core)) in rows.into_iter().enumerate() {
        let row = i + 2;
        if vertex >= n {
            return Err(CliError::Parse {
                path: path.into(),
                row,
                column: 1,
                message: format!("vertex {vertex} is out of range for {n} vertices"),
            });
        }
        if slots[vertex].is_some() {
            return Err(CliError::Parse {
                path: path.into(),
                row,
                column: 1,
                message: format!("vertex {vertex} is listed twice"),
            });
        }
        slots[vertex] = Some((community, core));
    }
    let mut labels = Vec::with_capacity(n);
    let mut flags = Vec::with_capacity(n);
    for (v, slot) in slots.into_iter().enumerate() {
        let (community, core) = slot.ok_or(CliError::MissingLabel(v))?;
        labels.push(community);
        flags.push(core);
    }
    let is_core = if flags.iter().all(Option::is_some) && !flags.is_empty() {
        Some(flags.into_iter().map(Option::unwrap).collect())
    } else if flags.iter().all(Option::is_none) {
        None
    } else {
        let v = flags.iter().position(Option::is_none).unwrap_or(0);
        return Err(CliError::Config(format!(
            "{}: core flag missing for vertex {v} but present for others",
            path.display()
        )));
    };
    let numeric: Option<Vec<usize>> = labels.iter().map(|l| l.parse().ok()).collect();
    let truth = match numeric {
        Some(ids) if is_contiguous(&ids) => GroundTruth::new(ids, is_core)?,
        _ => GroundTruth::from_raw_labels(&labels, is_core)?,
    };
    Ok(truth)
}

fn is_contiguous(ids: &[usize]) -> bool {
    let z = ids.iter().max().map_or(0, |m| m + 1);
    let mut seen = vec![false; z];
    ids.iter().for_each(|&l| seen[l] = true);
    seen.into_iter().all(|s| s)
}

pub fn write_points(path: &Path, points: &PointMatrix, header: bool) -> Result<()> {
    let mut w = csv_writer(path)?;
    let csv_err = |e| CliError::csv(path, e);
    if header {
        w.write_record((0..points.cols()).map(|j| format!("x{j}")))
            .map_err(csv_err)?;
    }
    for i in 0..points.rows() {
        w.write_record(points.row(i).iter().map(|x| x.to_string()))
            .map_err(csv_err)?;
    }
    w.flush().map_err(|e| CliError::io(path, e))
}

/// Reads a dense numeric matrix. Errors name the offending row and column
/// (1-based, counting the header line when present).
pub fn read_points(path: &Path, header: bool) -> Result<PointMatrix> {
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(header)
        .flexible(true)
        .trim(csv::Trim::All)
        .from_reader(open(path)?);
    let offset = if header { 2 } else { 1 };
    let mut cols = None;
    let mut rows = 0;
    let mut data = Vec::new();
    for (i, record) in reader.records().enumerate() {
        let row = i + offset;
        let record = record.map_err(|e| CliError::csv(path, e))?;
        let expected = *cols.get_or_insert(record.len());
        if record.len() != expected {
            return Err(CliError::Shape {
                path: path.into(),
                row,
                found: record.len(),
                expected,
            });
        }
        for (j, cell) in record.iter().enumerate() {
            let x: f64 = parse_cell(path, row, j + 1, cell)?;
            if !x.is_finite() {
                return Err(CliError::Parse {
                    path: path.into(),
                    row,
                    column: j + 1,
                    message: format!("non-finite value {cell:?}"),
                });
            }
            data.push(x);
        }
        rows += 1;
    }
    Ok(PointMatrix::new(rows, cols.unwrap_or(0), data)?)
}

#[derive(Debug, Serialize, Deserialize)]
struct ScoreRecord {
    vertex: usize,
    score: f64,
    rank: usize,
}

/// Writes `vertex,score,rank` in vertex order; rank 1 is the top vertex.
pub fn write_scores(path: &Path, scores: &ScoreVector, ranking: &Ranking) -> Result<()> {
    let mut w = csv_writer(path)?;
    let positions = ranking.positions();
    for (v, &score) in scores.as_slice().iter().enumerate() {
        w.serialize(ScoreRecord {
            vertex: v,
            score,
            rank: positions[v] + 1,
        })
        .map_err(|e| CliError::csv(path, e))?;
    }
    w.flush().map_err(|e| CliError::io(path, e))
}

pub fn read_scores(path: &Path, n: usize) -> Result<ScoreVector> {
    let mut reader = csv_reader(path, true)?;
    let mut scores = vec![None; n];
    for (i, record) in reader.deserialize::<ScoreRecord>().enumerate() {
        let record = record.map_err(|e| CliError::csv(path, e))?;
        if record.vertex >= n {
            return Err(CliError::Parse {
                path: path.into(),
                row: i + 2,
                column: 1,
                message: format!("vertex {} is out of range for {n} vertices", record.vertex),
            });
        }
        scores[record.vertex] = Some(record.score);
    }
    let values = scores
        .into_iter()
        .enumerate()
        .map(|(v, s)| s.ok_or(CliError::MissingLabel(v)))
        .collect::<Result<Vec<_>>>()?;
    Ok(ScoreVector::new(values))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Metric {
    Auroc,
    Balancedness,
    TotalBalancedness,
    Pr,
    Icef,
    Purity,
    Nmi,
    CcAlpha,
    CcBeta,
    RuntimeMs,
}

/// One measurement. `source` is the gamma value for synthetic sweeps and a
/// file-derived id otherwise; `c` is empty for metrics that do not depend
/// on a selection fraction.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ResultRow {
    pub seed: u64,
    pub method: String,
    pub source: String,
    pub metric: Metric,
    pub c: Option<f64>,
    pub value: f64,
}

pub fn write_results(path: &Path, rows: &[ResultRow]) -> Result<()> {
    let mut w = csv_writer(path)?;
    let csv_err = |e| CliError::csv(path, e);
    if rows.is_empty() {
        w.write_record(["seed", "method", "source", "metric", "c", "value"])
            .map_err(csv_err)?;
    }
    for row in rows {
        w.serialize(row).map_err(csv_err)?;
    }
    w.flush().map_err(|e| CliError::io(path, e))
}

pub fn read_results(path: &Path) -> Result<Vec<ResultRow>> {
    let mut reader = csv_reader(path, true)?;
    reader
        .deserialize()
        .map(|r| r.map_err(|e| CliError::csv(path, e)))
        .collect()
}

/// Writes any serializable records as CSV with a header derived from the
/// record fields.
pub fn write_records<T: Serialize>(path: &Path, header: &[&str], rows: &[T]) -> Result<()> {
    let mut w = csv::WriterBuilder::new()
        .has_headers(false)
        .from_writer(create(path)?);
    let csv_err = |e| CliError::csv(path, e);
    w.write_record(header).map_err(csv_err)?;
    for row in rows {
        w.serialize(row).map_err(csv_err)?;
    }
    w.flush().map_err(|e| CliError::io(path, e))
}

pub fn write_json<T: Serialize>(path: &Path, value: &T) -> Result<()> {
    let mut w = create(path)?;
    serde_json::to_writer_pretty(&mut w, value).map_err(|e| CliError::Json {
        path: path.into(),
        source: e,
    })?;
    writeln!(w).and_then(|_| w.flush()).map_err(|e| CliError::io(path, e))
}
