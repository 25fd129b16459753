//! Config-driven sweeps and the rank, select, cluster pipeline.

use std::path::{Path, PathBuf};
use std::sync::Arc;
use std::time::Instant;

use log::{error, info};
use mcpc_core::centrality::rank_descending;
use mcpc_core::cluster::{louvain, nmi, purity};
use mcpc_core::embed::{knn_graph, preprocess_vectors, PointMatrix, PreprocessOptions};
use mcpc_core::metrics::{
    auroc_core_prioritization, balancedness_at, core_concentration, icef, icef_curve,
    preservation_ratio, top_set_size, total_balancedness, verify_mcpc,
};
use mcpc_core::relcen::default_t;
use mcpc_core::synth::{sample_block_model, sample_concentric_gmm, table1_spec};
use mcpc_core::{DirectedGraph, GroundTruth, VertexSet};
use rayon::prelude::*;
use serde::Serialize;

use crate::config::{gmm_for_cell, ExperimentConfig, Method, Source};
use crate::error::{CliError, Result};
use crate::io::{read_edge_list, read_labels, read_points, write_records, write_results, Metric, ResultRow};
use crate::methods::score;

/// A graph with its ground truth and the initial step count used when a
/// method leaves `t` unset.
#[derive(Debug, Clone)]
pub struct Instance {
    pub graph: DirectedGraph,
    pub truth: GroundTruth,
    pub default_t: usize,
}

impl Instance {
    pub fn embedded(graph: DirectedGraph, truth: GroundTruth) -> Self {
        let t = default_t(graph.num_vertices());
        Self {
            graph,
            truth,
            default_t: t,
        }
    }
}

/// Reads a vector file and its labels, then log-normalizes and projects.
pub fn ingest_labeled_vectors(
    path: &Path,
    label_path: &Path,
    header: bool,
    options: &PreprocessOptions,
) -> Result<(PointMatrix, GroundTruth)> {
    let raw = read_points(path, header)?;
    let truth = read_labels(label_path, Some(raw.rows()))?;
    let points = preprocess_vectors(&raw, options)?;
    Ok((points, truth))
}

/// One (source, seed) unit of work.
#[derive(Debug, Clone)]
struct Cell {
    /// Sort key; the gamma value, or 0 for file sources.
    key: f64,
    source: String,
    seed: u64,
}

enum Prepared {
    Synthetic,
    Loaded(Arc<Instance>),
}

fn file_id(path: &Path) -> String {
    path.file_stem()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_else(|| path.display().to_string())
}

fn plan(config: &ExperimentConfig) -> Result<(Vec<Cell>, Prepared)> {
    let grid = |gammas: &[f64]| -> Vec<Cell> {
        gammas
            .iter()
            .flat_map(|&g| {
                config.seeds.iter().map(move |&seed| Cell {
                    key: g,
                    source: g.to_string(),
                    seed,
                })
            })
            .collect()
    };
    let per_seed = |id: String| -> Vec<Cell> {
        config
            .seeds
            .iter()
            .map(|&seed| Cell {
                key: 0.0,
                source: id.clone(),
                seed,
            })
            .collect()
    };
    Ok(match &config.source {
        Source::BlockModel { gammas, .. } | Source::Gmm { gammas, .. } => (grid(gammas), Prepared::Synthetic),
        Source::EdgeList { edges, labels } => {
            let truth = read_labels(labels, None)?;
            let graph = read_edge_list(edges, Some(truth.len()))?;
            if graph.num_vertices() != truth.len() {
                return Err(CliError::Config(format!(
                    "{} has {} vertices but {} labels",
                    edges.display(),
                    graph.num_vertices(),
                    truth.len()
                )));
            }
            (per_seed(file_id(edges)), Prepared::Loaded(Arc::new(Instance::embedded(graph, truth))))
        }
        Source::Vectors {
            vectors,
            labels,
            header,
            preprocess,
            k,
        } => {
            let (points, truth) = ingest_labeled_vectors(vectors, labels, *header, preprocess)?;
            let graph = knn_graph(&points, *k)?;
            (per_seed(file_id(vectors)), Prepared::Loaded(Arc::new(Instance::embedded(graph, truth))))
        }
    })
}

fn build(config: &ExperimentConfig, prepared: &Prepared, cell: &Cell) -> Result<Arc<Instance>> {
    if let Prepared::Loaded(instance) = prepared {
        return Ok(instance.clone());
    }
    let instance = match &config.source {
        Source::BlockModel { n, k, normalize, .. } => {
            let spec = table1_spec(cell.key, *n, *k, cell.seed, *normalize)?;
            let (graph, truth) = sample_block_model(&spec)?;
            Instance {
                graph,
                truth,
                default_t: 1,
            }
        }
        Source::Gmm { spec, k, .. } => {
            let spec = gmm_for_cell(spec.as_ref(), cell.key, cell.seed);
            let (rows, truth) = sample_concentric_gmm(&spec)?;
            let graph = knn_graph(&PointMatrix::from_rows(&rows)?, *k)?;
            Instance::embedded(graph, truth)
        }
        Source::EdgeList { .. } | Source::Vectors { .. } => unreachable!("file sources are loaded up front"),
    };
    Ok(Arc::new(instance))
}

/// Everything a sweep produced, already sorted.
#[derive(Debug, Clone, Default)]
pub struct SweepOutcome {
    pub rows: Vec<ResultRow>,
    /// `cc_alpha` / `cc_beta` of each generated graph, method `graph`.
    pub structure: Vec<ResultRow>,
    pub aborted: usize,
}

fn row(cell: &Cell, method: &str, metric: Metric, c: Option<f64>, value: f64) -> ResultRow {
    ResultRow {
        seed: cell.seed,
        method: method.to_string(),
        source: cell.source.clone(),
        metric,
        c,
        value,
    }
}

fn sweep_method(
    config: &ExperimentConfig,
    instance: &Instance,
    cell: &Cell,
    method: &Method,
) -> Result<Vec<ResultRow>> {
    let label = method.label();
    let start = Instant::now();
    let scores = score(method, &instance.graph, instance.default_t)?;
    let elapsed = start.elapsed();
    let ranking = rank_descending(&scores)?;
    let truth = &instance.truth;
    let mut out = Vec::new();
    if truth.core_flags().is_some() {
        out.push(row(cell, &label, Metric::Auroc, None, auroc_core_prioritization(&scores, truth)?));
        out.push(row(cell, &label, Metric::TotalBalancedness, None, total_balancedness(&ranking, truth)?));
        for &c in &config.c_grid {
            out.push(row(cell, &label, Metric::Balancedness, Some(c), balancedness_at(&ranking, truth, c)?));
        }
    }
    for (c, value) in icef_curve(&instance.graph, &ranking, truth.communities(), &config.c_grid)? {
        if let Some(value) = value {
            out.push(row(cell, &label, Metric::Icef, Some(c), value));
        }
    }
    if config.record_runtime {
        out.push(row(cell, &label, Metric::RuntimeMs, None, elapsed.as_secs_f64() * 1e3));
    }
    Ok(out)
}

fn sort_rows(rows: &mut [(f64, ResultRow)]) {
    rows.sort_by(|(ka, a), (kb, b)| {
        ka.total_cmp(kb)
            .then_with(|| a.source.cmp(&b.source))
            .then_with(|| a.method.cmp(&b.method))
            .then_with(|| a.seed.cmp(&b.seed))
            .then_with(|| a.metric.cmp(&b.metric))
            .then_with(|| a.c.unwrap_or(-1.0).total_cmp(&b.c.unwrap_or(-1.0)))
    });
}

/// Computes the sweep in memory. A failing cell or method is logged and
/// counted in `aborted`; the rest of the sweep continues.
pub fn sweep(config: &ExperimentConfig) -> Result<SweepOutcome> {
    config.validate()?;
    let (cells, prepared) = plan(config)?;
    // generate each cell once, then fan out over methods
    let instances: Vec<(Cell, Result<Arc<Instance>>)> = cells
        .par_iter()
        .map(|cell| (cell.clone(), build(config, &prepared, cell)))
        .collect();
    let mut aborted = 0;
    let mut ready = Vec::new();
    for (cell, instance) in instances {
        match instance {
            Ok(i) => ready.push((cell, i)),
            Err(e) => {
                error!("source {} seed {}: {e}", cell.source, cell.seed);
                aborted += 1;
            }
        }
    }
    let results: Vec<(Cell, Option<Method>, Result<Vec<ResultRow>>)> = ready
        .par_iter()
        .flat_map_iter(|(cell, instance)| {
            std::iter::once(None)
                .chain(config.methods.iter().copied().map(Some))
                .map(move |m| (cell, instance, m))
        })
        .map(|(cell, instance, method)| {
            let out = match method {
                None => structure_rows(instance, cell),
                Some(m) => sweep_method(config, instance, cell, &m),
            };
            (cell.clone(), method, out)
        })
        .collect();
    let mut rows = Vec::new();
    let mut structure = Vec::new();
    for (cell, method, out) in results {
        match (method, out) {
            (None, Ok(r)) => structure.extend(r.into_iter().map(|r| (cell.key, r))),
            (Some(_), Ok(r)) => rows.extend(r.into_iter().map(|r| (cell.key, r))),
            (m, Err(e)) => {
                let what = m.map_or("structure".to_string(), |m| m.label());
                error!("source {} seed {} {what}: {e}", cell.source, cell.seed);
                aborted += 1;
            }
        }
    }
    sort_rows(&mut rows);
    sort_rows(&mut structure);
    Ok(SweepOutcome {
        rows: rows.into_iter().map(|(_, r)| r).collect(),
        structure: structure.into_iter().map(|(_, r)| r).collect(),
        aborted,
    })
}

fn structure_rows(instance: &Instance, cell: &Cell) -> Result<Vec<ResultRow>> {
    if instance.truth.core_flags().is_none() {
        return Ok(Vec::new());
    }
    let report = verify_mcpc(&instance.graph, &instance.truth)?;
    Ok(vec![
        row(cell, "graph", Metric::CcAlpha, None, report.alpha),
        row(cell, "graph", Metric::CcBeta, None, report.beta),
    ])
}

/// Runs [`sweep`] and writes `results.csv` and `structure.csv` into the
/// configured output directory.
pub fn run_gamma_sweep(config: &ExperimentConfig) -> Result<SweepOutcome> {
    let outcome = sweep(config)?;
    write_results(&config.outputs.join("results.csv"), &outcome.rows)?;
    write_results(&config.outputs.join("structure.csv"), &outcome.structure)?;
    info!(
        "wrote {} result rows to {}",
        outcome.rows.len(),
        config.outputs.display()
    );
    Ok(outcome)
}

/// Medians over seeds of the selection metrics for one method and fraction.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TableRow {
    pub source: String,
    pub method: String,
    pub c: Option<f64>,
    pub pr: Option<f64>,
    pub icef: Option<f64>,
    pub purity: Option<f64>,
    pub nmi: Option<f64>,
}

/// Concentration of a whole community next to that of its selected part.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CoreCcRow {
    pub source: String,
    pub seed: u64,
    pub method: String,
    pub c: f64,
    pub community: usize,
    pub cc_community: Option<f64>,
    pub cc_selected: Option<f64>,
}

#[derive(Debug, Clone, Default)]
pub struct SelectOutcome {
    pub rows: Vec<ResultRow>,
    pub table: Vec<TableRow>,
    pub core_cc: Vec<CoreCcRow>,
    pub aborted: usize,
}

pub const ORIGINAL: &str = "original";

fn cluster_scores(
    config: &ExperimentConfig,
    graph: &DirectedGraph,
    truth: &GroundTruth,
    seed: u64,
) -> Result<(f64, f64)> {
    let pred = louvain(&graph.symmetrize(), seed, config.resolution)?;
    Ok((purity(&pred, truth.communities())?, nmi(&pred, truth.communities(), config.nmi)?))
}

fn original_rows(config: &ExperimentConfig, instance: &Instance, cell: &Cell) -> Result<Vec<ResultRow>> {
    let (p, q) = cluster_scores(config, &instance.graph, &instance.truth, cell.seed)?;
    Ok(vec![
        row(cell, ORIGINAL, Metric::Pr, None, 1.0),
        row(cell, ORIGINAL, Metric::Icef, None, icef(&instance.graph, instance.truth.communities())?),
        row(cell, ORIGINAL, Metric::Purity, None, p),
        row(cell, ORIGINAL, Metric::Nmi, None, q),
    ])
}

fn select_method(
    config: &ExperimentConfig,
    instance: &Instance,
    cell: &Cell,
    method: &Method,
) -> Result<(Vec<ResultRow>, Vec<CoreCcRow>)> {
    let label = method.label();
    let n = instance.graph.num_vertices();
    let truth = &instance.truth;
    let ranking = rank_descending(&score(method, &instance.graph, instance.default_t)?)?;
    let whole: Vec<Option<f64>> = (0..truth.num_communities())
        .map(|l| core_concentration(&instance.graph, &truth.community_set(l)).ok())
        .collect();
    let mut rows = Vec::new();
    let mut cc = Vec::new();
    for &c in &config.c_grid {
        let set = VertexSet::from_indices(n, ranking.top(top_set_size(c, n)).iter().copied())?;
        let (sub, _) = instance.graph.induced_subgraph(&set)?;
        let sub_truth = truth.restrict(&set);
        rows.push(row(cell, &label, Metric::Pr, Some(c), preservation_ratio(&set, truth)?));
        rows.push(row(cell, &label, Metric::Icef, Some(c), icef(&sub, sub_truth.communities())?));
        let (p, q) = cluster_scores(config, &sub, &sub_truth, cell.seed)?;
        rows.push(row(cell, &label, Metric::Purity, Some(c), p));
        rows.push(row(cell, &label, Metric::Nmi, Some(c), q));
        for (l, &cc_community) in whole.iter().enumerate() {
            let part = set
                .indices()
                .iter()
                .copied()
                .filter(|&v| truth.community(v) == l);
            let part = VertexSet::from_indices(n, part)?;
            cc.push(CoreCcRow {
                source: cell.source.clone(),
                seed: cell.seed,
                method: label.clone(),
                c,
                community: l,
                cc_community,
                cc_selected: core_concentration(&instance.graph, &part).ok(),
            });
        }
    }
    Ok((rows, cc))
}

fn median(mut values: Vec<f64>) -> Option<f64> {
    if values.is_empty() {
        return None;
    }
    values.sort_by(f64::total_cmp);
    let m = values.len() / 2;
    Some(if values.len() % 2 == 1 {
        values[m]
    } else {
        0.5 * (values[m - 1] + values[m])
    })
}

fn summarize(config: &ExperimentConfig, rows: &[ResultRow], sources: &[String]) -> Vec<TableRow> {
    let pick = |source: &str, method: &str, c: Option<f64>, metric: Metric| {
        median(
            rows.iter()
                .filter(|r| r.source == source && r.method == method && r.c == c && r.metric == metric)
                .map(|r| r.value)
                .collect(),
        )
    };
    let mut table = Vec::new();
    for source in sources {
        let mut entries = vec![(ORIGINAL.to_string(), None)];
        for m in &config.methods {
            entries.extend(config.c_grid.iter().map(|&c| (m.label(), Some(c))));
        }
        for (method, c) in entries {
            table.push(TableRow {
                source: source.clone(),
                method: method.clone(),
                c,
                pr: pick(source, &method, c, Metric::Pr),
                icef: pick(source, &method, c, Metric::Icef),
                purity: pick(source, &method, c, Metric::Purity),
                nmi: pick(source, &method, c, Metric::Nmi),
            });
        }
    }
    table
}

/// Ranks, keeps the top `c` fraction, and scores the kept subgraph against
/// the ground truth, next to an `original` row for the whole graph.
pub fn select_and_cluster(config: &ExperimentConfig) -> Result<SelectOutcome> {
    config.validate()?;
    let (cells, prepared) = plan(config)?;
    let mut sources: Vec<String> = Vec::new();
    for c in &cells {
        if !sources.contains(&c.source) {
            sources.push(c.source.clone());
        }
    }
    let built: Vec<(Cell, Result<Arc<Instance>>)> = cells
        .par_iter()
        .map(|cell| (cell.clone(), build(config, &prepared, cell)))
        .collect();
    let mut aborted = 0;
    let mut ready = Vec::new();
    for (cell, instance) in built {
        match instance {
            Ok(i) => ready.push((cell, i)),
            Err(e) => {
                error!("source {} seed {}: {e}", cell.source, cell.seed);
                aborted += 1;
            }
        }
    }
    type Job<'a> = (&'a Cell, &'a Arc<Instance>, Option<Method>);
    let results: Vec<(Cell, Option<Method>, Result<(Vec<ResultRow>, Vec<CoreCcRow>)>)> = ready
        .par_iter()
        .flat_map_iter(|(cell, instance)| {
            std::iter::once(None)
                .chain(config.methods.iter().copied().map(Some))
                .map(move |m| -> Job<'_> { (cell, instance, m) })
        })
        .map(|(cell, instance, method)| {
            let out = match method {
                None => original_rows(config, instance, cell).map(|r| (r, Vec::new())),
                Some(m) => select_method(config, instance, cell, &m),
            };
            (cell.clone(), method, out)
        })
        .collect();
    let mut rows = Vec::new();
    let mut core_cc = Vec::new();
    for (cell, method, out) in results {
        match out {
            Ok((r, cc)) => {
                rows.extend(r.into_iter().map(|r| (cell.key, r)));
                core_cc.extend(cc.into_iter().map(|r| (cell.key, r)));
            }
            Err(e) => {
                let what = method.map_or(ORIGINAL.to_string(), |m| m.label());
                error!("source {} seed {} {what}: {e}", cell.source, cell.seed);
                aborted += 1;
            }
        }
    }
    sort_rows(&mut rows);
    core_cc.sort_by(|(ka, a), (kb, b)| {
        ka.total_cmp(kb)
            .then_with(|| a.source.cmp(&b.source))
            .then_with(|| a.method.cmp(&b.method))
            .then_with(|| a.seed.cmp(&b.seed))
            .then_with(|| a.c.total_cmp(&b.c))
            .then_with(|| a.community.cmp(&b.community))
    });
    let rows: Vec<ResultRow> = rows.into_iter().map(|(_, r)| r).collect();
    let table = summarize(config, &rows, &sources);
    Ok(SelectOutcome {
        rows,
        table,
        core_cc: core_cc.into_iter().map(|(_, r)| r).collect(),
        aborted,
    })
}

/// Runs [`select_and_cluster`] and writes `select.csv`, `table.csv` and
/// `core_cc.csv` into the configured output directory.
pub fn run_select_and_cluster(config: &ExperimentConfig) -> Result<SelectOutcome> {
    let outcome = select_and_cluster(config)?;
    let dir: PathBuf = config.outputs.clone();
    write_results(&dir.join("select.csv"), &outcome.rows)?;
    write_records(
        &dir.join("table.csv"),
        &["source", "method", "c", "pr", "icef", "purity", "nmi"],
        &outcome.table,
    )?;
    write_records(
        &dir.join("core_cc.csv"),
        &["source", "seed", "method", "c", "community", "cc_community", "cc_selected"],
        &outcome.core_cc,
    )?;
    Ok(outcome)
}
