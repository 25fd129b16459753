use std::fs;
use std::path::{Path, PathBuf};

use mcpc_core::cluster::NmiNormalization;
use mcpc_core::embed::PreprocessOptions;
use mcpc_core::synth::GmmSpec;
use serde::{Deserialize, Serialize};

use crate::error::{CliError, Result};

/// Where the graphs of an experiment come from.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case", deny_unknown_fields)]
pub enum Source {
    /// The parameterized four-block model, one graph per (gamma, seed).
    BlockModel {
        gammas: Vec<f64>,
        #[serde(default = "default_block_n")]
        n: usize,
        #[serde(default = "default_block_k")]
        k: f64,
        #[serde(default = "default_true")]
        normalize: bool,
    },
    /// Two-community concentric mixture embedded as a k-NN graph. `gamma`
    /// scales the second community's deviations; `spec` replaces the default
    /// mixture entirely, in which case its seed is overridden per run and
    /// `gammas` only label the cells.
    Gmm {
        #[serde(default)]
        gammas: Vec<f64>,
        #[serde(default)]
        spec: Option<GmmSpec>,
        #[serde(default = "default_knn")]
        k: usize,
    },
    EdgeList {
        edges: PathBuf,
        labels: PathBuf,
    },
    Vectors {
        vectors: PathBuf,
        labels: PathBuf,
        #[serde(default)]
        header: bool,
        #[serde(default)]
        preprocess: PreprocessOptions,
        #[serde(default = "default_knn")]
        k: usize,
    },
}

/// A ranking method and its parameters. `t = None` picks 1 on block-model
/// graphs and `ceil(ln n)` elsewhere.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "name", rename_all = "lowercase", deny_unknown_fields)]
pub enum Method {
    Degree,
    Pagerank {
        #[serde(default = "default_damping")]
        damping: f64,
    },
    Katz {
        #[serde(default)]
        alpha: Option<f64>,
    },
    Onion,
    Nrank {
        #[serde(default)]
        t: Option<usize>,
    },
    N2rank {
        #[serde(default)]
        t: Option<usize>,
    },
    Rnrank {
        #[serde(default)]
        t: Option<usize>,
    },
}

impl Method {
    /// Column label used in every output file.
    pub fn label(&self) -> String {
        match self {
            Method::Degree => "degree".into(),
            Method::Pagerank { damping } => format!("pagerank_{damping}"),
            Method::Katz { alpha: None } => "katz".into(),
            Method::Katz { alpha: Some(a) } => format!("katz_{a}"),
            Method::Onion => "onion".into(),
            Method::Nrank { t } => with_t("nrank", *t),
            Method::N2rank { t } => with_t("n2rank", *t),
            Method::Rnrank { t } => with_t("rnrank", *t),
        }
    }

    /// Degree, PageRank at 0.5/0.85/0.99, Katz, onion, and the three
    /// relative-centrality rankings.
    pub fn standard_set() -> Vec<Method> {
        vec![
            Method::Degree,
            Method::Pagerank { damping: 0.5 },
            Method::Pagerank { damping: 0.85 },
            Method::Pagerank { damping: 0.99 },
            Method::Katz { alpha: None },
            Method::Onion,
            Method::Nrank { t: None },
            Method::N2rank { t: None },
            Method::Rnrank { t: None },
        ]
    }

    /// Parses the short command-line form, e.g. `pagerank`, `rnrank`.
    pub fn from_cli(name: &str, damping: f64, alpha: Option<f64>, t: Option<usize>) -> Result<Self> {
        Ok(match name {
            "degree" => Method::Degree,
            "pagerank" => Method::Pagerank { damping },
            "katz" => Method::Katz { alpha },
            "onion" => Method::Onion,
            "nrank" => Method::Nrank { t },
            "n2rank" => Method::N2rank { t },
            "rnrank" => Method::Rnrank { t },
            other => return Err(CliError::Config(format!("unknown method '{other}'"))),
        })
    }
}

fn with_t(name: &str, t: Option<usize>) -> String {
    match t {
        Some(t) => format!("{name}_t{t}"),
        None => name.into(),
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub source: Source,
    #[serde(default = "Method::standard_set")]
    pub methods: Vec<Method>,
    #[serde(default = "default_c_grid")]
    pub c_grid: Vec<f64>,
    #[serde(default = "default_seeds")]
    pub seeds: Vec<u64>,
    #[serde(default = "default_outputs")]
    pub outputs: PathBuf,
    #[serde(default = "default_resolution")]
    pub resolution: f64,
    #[serde(default)]
    pub nmi: NmiNormalization,
    /// Adds `runtime_ms` rows; off by default so reruns are byte-identical.
    #[serde(default)]
    pub record_runtime: bool,
}

impl ExperimentConfig {
    pub fn from_json(text: &str) -> Result<Self> {
        let config: Self =
            serde_json::from_str(text).map_err(|e| CliError::Config(e.to_string()))?;
        config.validate()?;
        Ok(config)
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = fs::read_to_string(path)
            .map_err(|e| CliError::Config(format!("cannot read {}: {e}", path.display())))?;
        Self::from_json(&text).map_err(|e| match e {
            CliError::Config(msg) => CliError::Config(format!("{}: {msg}", path.display())),
            other => other,
        })
    }

    pub fn validate(&self) -> Result<()> {
        if self.methods.is_empty() {
            return Err(CliError::Config("at least one method is required".into()));
        }
        if let Some(c) = self.c_grid.iter().find(|c| !(**c > 0.0 && **c <= 1.0)) {
            return Err(CliError::Config(format!("selection fraction {c} is outside (0, 1]")));
        }
        if self.seeds.is_empty() {
            return Err(CliError::Config("at least one seed is required".into()));
        }
        if !(self.resolution > 0.0 && self.resolution.is_finite()) {
            return Err(CliError::Config(format!("resolution {} must be positive", self.resolution)));
        }
        for m in &self.methods {
            match *m {
                Method::Pagerank { damping } if !(damping > 0.0 && damping < 1.0) => {
                    return Err(CliError::Config(format!("damping {damping} is outside (0, 1)")));
                }
                Method::Katz { alpha: Some(a) } if !(a > 0.0 && a.is_finite()) => {
                    return Err(CliError::Config(format!("katz alpha {a} must be positive")));
                }
                Method::Nrank { t: Some(0) } | Method::N2rank { t: Some(0) } | Method::Rnrank { t: Some(0) } => {
                    return Err(CliError::Config("t must be at least 1".into()));
                }
                _ => {}
            }
        }
        match &self.source {
            Source::BlockModel { gammas, n, k, .. } => {
                if let Some(g) = gammas.iter().find(|g| !(0.0..=0.2).contains(*g)) {
                    return Err(CliError::Config(format!("gamma {g} is outside [0, 0.2]")));
                }
                if *n < 4 || !(*k >= 1.0) {
                    return Err(CliError::Config("block model needs n >= 4 and k >= 1".into()));
                }
            }
            Source::Gmm { gammas, spec, k } => {
                if spec.is_none() {
                    if let Some(g) = gammas.iter().find(|g| !(**g >= 0.0 && g.is_finite())) {
                        return Err(CliError::Config(format!("gamma {g} must be non-negative")));
                    }
                }
                if *k == 0 {
                    return Err(CliError::Config("k must be at least 1".into()));
                }
            }
            Source::EdgeList { edges, labels } => {
                require_file(edges)?;
                require_file(labels)?;
            }
            Source::Vectors { vectors, labels, k, .. } => {
                require_file(vectors)?;
                require_file(labels)?;
                if *k == 0 {
                    return Err(CliError::Config("k must be at least 1".into()));
                }
            }
        }
        Ok(())
    }
}

fn require_file(path: &Path) -> Result<()> {
    if path.is_file() {
        Ok(())
    } else {
        Err(CliError::Config(format!("{} does not exist", path.display())))
    }
}

/// The mixture for one (gamma, seed) cell: `spec` with its seed replaced
/// when given, else the two-community default at `gamma`.
pub fn gmm_for_cell(spec: Option<&GmmSpec>, gamma: f64, seed: u64) -> GmmSpec {
    match spec {
        Some(spec) => GmmSpec {
            seed,
            ..spec.clone()
        },
        None => GmmSpec::two_community_default(gamma, seed),
    }
}

fn default_block_n() -> usize {
    4000
}

fn default_block_k() -> f64 {
    20.0
}

fn default_knn() -> usize {
    20
}

fn default_true() -> bool {
    true
}

fn default_damping() -> f64 {
    0.85
}

fn default_c_grid() -> Vec<f64> {
    vec![0.2]
}

fn default_seeds() -> Vec<u64> {
    (0..10).collect()
}

fn default_outputs() -> PathBuf {
    PathBuf::from("out")
}

fn default_resolution() -> f64 {
    1.0
}
