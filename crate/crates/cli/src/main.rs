use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use log::error;
use mcpc_cli::config::{gmm_for_cell, ExperimentConfig, Method};
use mcpc_cli::error::{CliError, Result};
use mcpc_cli::experiment::{run_gamma_sweep, run_select_and_cluster};
use mcpc_cli::io::{
    read_edge_list, read_labels, read_points, read_scores, write_edge_list, write_json, write_labels,
    write_points, write_records, write_results, write_scores, Metric, ResultRow,
};
use mcpc_cli::methods::score;
use mcpc_core::centrality::rank_descending;
use mcpc_core::cluster::{louvain, nmi, purity, NmiNormalization};
use mcpc_core::embed::{knn_graph, preprocess_vectors, PointMatrix, PreprocessOptions};
use mcpc_core::relcen::default_t;
use mcpc_core::metrics::{auroc_core_prioritization, balancedness_at, icef_curve, total_balancedness, verify_mcpc};
use mcpc_core::synth::{sample_block_model, sample_concentric_gmm, table1_spec, BlockModelSpec, GmmSpec};

#[derive(Parser)]
#[command(name = "mcpc", version, about = "Core ranking experiments on multi-core-periphery graphs")]
struct Cli {
    #[command(flatten)]
    global: Global,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct Global {
    /// Random seed; for sweeps it replaces the configured seed list.
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Worker threads (default: all cores).
    #[arg(long, global = true)]
    threads: Option<usize>,
    /// JSON file: an experiment config for sweep/select-cluster, a model
    /// spec for the generators.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    #[arg(long, global = true, default_value = ".")]
    out_dir: PathBuf,
}

#[derive(Subcommand)]
enum Command {
    /// Sample the four-block core-periphery model (edges.tsv, labels.csv).
    GenerateBlock {
        #[arg(long, default_value_t = 0.0)]
        gamma: f64,
        #[arg(long, default_value_t = 4000)]
        n: usize,
        #[arg(long, default_value_t = 20.0)]
        k: f64,
        /// Use the probability table exactly as printed, without rescaling
        /// rows to sum 1.
        #[arg(long)]
        no_row_normalize: bool,
    },
    /// Sample the concentric Gaussian mixture (points.csv, labels.csv).
    GenerateGmm {
        #[arg(long, default_value_t = 1.0)]
        gamma: f64,
        #[arg(long)]
        header: bool,
    },
    /// Build the directed k-nearest-neighbor graph of a point file.
    Knn {
        #[arg(long)]
        input: PathBuf,
        #[arg(long)]
        header: bool,
        #[arg(long, default_value_t = 20)]
        k: usize,
        /// Project onto this many principal components first.
        #[arg(long)]
        pca: Option<usize>,
        /// Log-normalize rows before any projection.
        #[arg(long)]
        log_normalize: bool,
    },
    /// Score and rank the vertices of an edge list.
    Rank {
        #[arg(long)]
        edges: PathBuf,
        #[command(flatten)]
        method: MethodArgs,
        #[arg(long)]
        output_scores: Option<PathBuf>,
    },
    /// Evaluate a score file against labels (metrics.csv, mcpc.json).
    Metrics {
        #[arg(long)]
        edges: PathBuf,
        #[arg(long)]
        labels: PathBuf,
        #[arg(long)]
        scores: PathBuf,
        #[arg(long, value_delimiter = ',', default_value = "0.2")]
        c: Vec<f64>,
    },
    /// Louvain communities of the symmetrized graph (clusters.csv).
    Cluster {
        #[arg(long)]
        edges: PathBuf,
        /// Ground truth for purity and NMI.
        #[arg(long)]
        labels: Option<PathBuf>,
        #[arg(long, default_value_t = 1.0)]
        resolution: f64,
        #[arg(long, default_value = "arithmetic")]
        nmi: NmiNormalization,
    },
    /// Run a configured sweep (results.csv, structure.csv).
    Sweep,
    /// Run the rank, select, cluster report (select.csv, table.csv, core_cc.csv).
    SelectCluster,
}

#[derive(Args)]
struct MethodArgs {
    /// degree, pagerank, katz, onion, nrank, n2rank or rnrank.
    #[arg(long, default_value = "rnrank")]
    method: String,
    #[arg(long, default_value_t = 0.85)]
    damping: f64,
    #[arg(long)]
    alpha: Option<f64>,
    /// Initial step count; defaults to ceil(ln n).
    #[arg(long)]
    t: Option<usize>,
}

fn read_json<T: serde::de::DeserializeOwned>(path: &Path) -> Result<T> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| CliError::Config(format!("cannot read {}: {e}", path.display())))?;
    serde_json::from_str(&text).map_err(|e| CliError::Config(format!("{}: {e}", path.display())))
}

fn experiment_config(global: &Global, out_dir_given: bool) -> Result<ExperimentConfig> {
    let path = global
        .config
        .as_ref()
        .ok_or_else(|| CliError::Config("--config is required".into()))?;
    let mut config = ExperimentConfig::load(path)?;
    if let Some(seed) = global.seed {
        config.seeds = vec![seed];
    }
    if out_dir_given {
        config.outputs = global.out_dir.clone();
    }
    Ok(config)
}

fn finish(aborted: usize) -> Result<()> {
    if aborted > 0 {
        Err(CliError::AbortedCells(aborted))
    } else {
        Ok(())
    }
}

fn run(cli: Cli, out_dir_given: bool) -> Result<()> {
    let g = &cli.global;
    let seed = g.seed.unwrap_or(0);
    let out = &g.out_dir;
    match cli.command {
        Command::GenerateBlock {
            gamma,
            n,
            k,
            no_row_normalize,
        } => {
            let spec = match &g.config {
                Some(path) => BlockModelSpec {
                    seed,
                    ..read_json(path)?
                },
                None => table1_spec(gamma, n, k, seed, !no_row_normalize)
                    .map_err(|e| CliError::Config(e.to_string()))?,
            };
            let (graph, truth) = sample_block_model(&spec)?;
            write_edge_list(&out.join("edges.tsv"), &graph)?;
            write_labels(&out.join("labels.csv"), &truth)
        }
        Command::GenerateGmm { gamma, header } => {
            let template: Option<GmmSpec> = g.config.as_deref().map(read_json).transpose()?;
            let spec = gmm_for_cell(template.as_ref(), gamma, seed);
            let (rows, truth) = sample_concentric_gmm(&spec)?;
            write_points(&out.join("points.csv"), &PointMatrix::from_rows(&rows)?, header)?;
            write_labels(&out.join("labels.csv"), &truth)
        }
        Command::Knn {
            input,
            header,
            k,
            pca,
            log_normalize,
        } => {
            let options = PreprocessOptions {
                log_normalize,
                target_dim: pca,
                seed,
                ..PreprocessOptions::default()
            };
            let points = preprocess_vectors(&read_points(&input, header)?, &options)?;
            write_edge_list(&out.join("edges.tsv"), &knn_graph(&points, k)?)
        }
        Command::Rank {
            edges,
            method,
            output_scores,
        } => {
            let m = Method::from_cli(&method.method, method.damping, method.alpha, method.t)?;
            let graph = read_edge_list(&edges, None)?;
            let scores = score(&m, &graph, default_t(graph.num_vertices()))?;
            let ranking = rank_descending(&scores)?;
            let path = output_scores.unwrap_or_else(|| out.join("scores.csv"));
            write_scores(&path, &scores, &ranking)
        }
        Command::Metrics {
            edges,
            labels,
            scores,
            c,
        } => {
            if let Some(bad) = c.iter().find(|c| !(**c > 0.0 && **c <= 1.0)) {
                return Err(CliError::Config(format!("selection fraction {bad} is outside (0, 1]")));
            }
            let truth = read_labels(&labels, None)?;
            let graph = read_edge_list(&edges, Some(truth.len()))?;
            let s = read_scores(&scores, graph.num_vertices())?;
            let ranking = rank_descending(&s)?;
            let method = scores
                .file_stem()
                .map(|s| s.to_string_lossy().into_owned())
                .unwrap_or_default();
            let source = edges
                .file_stem()
                .map(|s| s.to_string_lossy().into_owned())
                .unwrap_or_default();
            let row = |metric, c, value| ResultRow {
                seed,
                method: method.clone(),
                source: source.clone(),
                metric,
                c,
                value,
            };
            let mut rows = Vec::new();
            if truth.core_flags().is_some() {
                rows.push(row(Metric::Auroc, None, auroc_core_prioritization(&s, &truth)?));
                rows.push(row(Metric::TotalBalancedness, None, total_balancedness(&ranking, &truth)?));
                for &c in &c {
                    rows.push(row(Metric::Balancedness, Some(c), balancedness_at(&ranking, &truth, c)?));
                }
                write_json(&out.join("mcpc.json"), &verify_mcpc(&graph, &truth)?)?;
            }
            for (c, value) in icef_curve(&graph, &ranking, truth.communities(), &c)? {
                if let Some(v) = value {
                    rows.push(row(Metric::Icef, Some(c), v));
                }
            }
            write_results(&out.join("metrics.csv"), &rows)
        }
        Command::Cluster {
            edges,
            labels,
            resolution,
            nmi: norm,
        } => {
            let truth = labels.as_deref().map(|p| read_labels(p, None)).transpose()?;
            let graph = read_edge_list(&edges, truth.as_ref().map(|t| t.len()))?;
            let pred = louvain(&graph.symmetrize(), seed, resolution)?;
            let records: Vec<(usize, usize)> = pred.iter().copied().enumerate().collect();
            write_records(&out.join("clusters.csv"), &["vertex", "cluster"], &records)?;
            if let Some(truth) = truth {
                let rows = vec![
                    (Metric::Purity, purity(&pred, truth.communities())?),
                    (Metric::Nmi, nmi(&pred, truth.communities(), norm)?),
                ]
                .into_iter()
                .map(|(metric, value)| ResultRow {
                    seed,
                    method: "louvain".into(),
                    source: "cluster".into(),
                    metric,
                    c: None,
                    value,
                })
                .collect::<Vec<_>>();
                write_results(&out.join("cluster_metrics.csv"), &rows)?;
            }
            Ok(())
        }
        Command::Sweep => finish(run_gamma_sweep(&experiment_config(g, out_dir_given)?)?.aborted),
        Command::SelectCluster => finish(run_select_and_cluster(&experiment_config(g, out_dir_given)?)?.aborted),
    }
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("info")).init();
    let out_dir_given = std::env::args().any(|a| a == "--out-dir" || a.starts_with("--out-dir="));
    let cli = Cli::parse();
    if let Some(threads) = cli.global.threads {
        if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(threads).build_global() {
            error!("cannot configure {threads} threads: {e}");
            return ExitCode::from(2);
        }
    }
    match run(cli, out_dir_given) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            error!("{e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
