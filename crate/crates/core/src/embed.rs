//! Point clouds to directed k-NN graphs, plus the log-normalize + PCA
//! preprocessing applied to count-like vector data before embedding.

use nalgebra::{DMatrix, SymmetricEigen};
use rand::Rng;
use rand_distr::StandardNormal;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::DirectedGraph;
use crate::rng::stream_rng;

/// Dense row-major `n x d` matrix of finite reals.
#[derive(Debug, Clone, PartialEq)]
pub struct PointMatrix {
    rows: usize,
    cols: usize,
    data: Vec<f64>,
}

impl PointMatrix {
    pub fn new(rows: usize, cols: usize, data: Vec<f64>) -> Result<Self> {
        if data.len() != rows * cols {
            return Err(Error::LengthMismatch {
                left: data.len(),
                right: rows * cols,
            });
        }
        if let Some(pos) = data.iter().position(|x| !x.is_finite()) {
            return Err(Error::NonFiniteEntry {
                row: pos / cols.max(1),
                col: pos % cols.max(1),
            });
        }
        Ok(Self { rows, cols, data })
    }

    pub fn from_rows(rows: &[Vec<f64>]) -> Result<Self> {
        let cols = rows.first().map_or(0, Vec::len);
        if let Some(bad) = rows.iter().find(|r| r.len() != cols) {
            return Err(Error::LengthMismatch {
                left: bad.len(),
                right: cols,
            });
        }
        Self::new(rows.len(), cols, rows.concat())
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn row(&self, i: usize) -> &[f64] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.data
    }

    pub fn to_rows(&self) -> Vec<Vec<f64>> {
        (0..self.rows).map(|i| self.row(i).to_vec()).collect()
    }
}

fn squared_distance(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum()
}

/// Exact directed k-NN graph: every point gets edges to its `k` nearest other
/// points by Euclidean distance, ties going to the smaller index.
pub fn knn_graph(points: &PointMatrix, k: usize) -> Result<DirectedGraph> {
    let n = points.rows();
    if k == 0 || k >= n {
        return Err(Error::InvalidNeighborCount { k, n });
    }
    let lists: Vec<Vec<usize>> = (0..n)
        .into_par_iter()
        .map_init(
            || Vec::with_capacity(n),
            |scratch: &mut Vec<(f64, usize)>, i| {
                scratch.clear();
                let query = points.row(i);
                scratch.extend(
                    (0..n)
                        .filter(|&j| j != i)
                        .map(|j| (squared_distance(query, points.row(j)), j)),
                );
                let by_distance =
                    |a: &(f64, usize), b: &(f64, usize)| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1));
                if k < scratch.len() {
                    scratch.select_nth_unstable_by(k - 1, by_distance);
                }
                let nearest = &mut scratch[..k];
                nearest.sort_unstable_by(by_distance);
                nearest.iter().map(|&(_, j)| j).collect()
            },
        )
        .collect();
    DirectedGraph::from_out_lists(lists)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct PreprocessOptions {
    /// Scale each row to sum `scale`, then apply `ln(1 + x)`.
    pub log_normalize: bool,
    pub scale: f64,
    /// Number of principal components to keep; `None` skips the projection.
    pub target_dim: Option<usize>,
    /// Seeds the randomized range finder used for very wide inputs.
    pub seed: u64,
}

impl Default for PreprocessOptions {
    fn default() -> Self {
        Self {
            log_normalize: true,
            scale: 10_000.0,
            target_dim: Some(50),
            seed: 0,
        }
    }
}

/// Above this many columns PCA switches from the dense covariance
/// eigendecomposition to a randomized range finder.
const DENSE_PCA_MAX_COLS: usize = 2000;

pub fn preprocess_vectors(points: &PointMatrix, options: &PreprocessOptions) -> Result<PointMatrix> {
    let mut current = points.clone();
    if options.log_normalize {
        current = log_normalize(&current, options.scale)?;
    }
    if let Some(dim) = options.target_dim {
        current = pca_project(&current, dim, options.seed)?;
    }
    Ok(current)
}

/// Row-scales to `scale` and applies `ln(1 + x)`. Rows summing to zero stay zero.
pub fn log_normalize(points: &PointMatrix, scale: f64) -> Result<PointMatrix> {
    if !(scale > 0.0) {
        return Err(Error::InvalidParameter(format!("scale = {scale} must be positive")));
    }
    let (n, d) = (points.rows(), points.cols());
    let mut data = Vec::with_capacity(n * d);
    for i in 0..n {
        let row = points.row(i);
        if let Some(col) = row.iter().position(|&x| x < 0.0) {
            return Err(Error::NegativeEntry {
                row: i,
                col,
                value: row[col],
            });
        }
        let sum: f64 = row.iter().sum();
        if sum == 0.0 {
            log::warn!("row {i} sums to zero; left as zeros");
            data.extend(std::iter::repeat_n(0.0, d));
        } else {
            data.extend(row.iter().map(|&x| (x / sum * scale).ln_1p()));
        }
    }
    PointMatrix::new(n, d, data)
}

/// Mean-centers and projects onto the top `target_dim` principal components.
/// Each component's sign makes its largest-magnitude loading positive.
pub fn pca_project(points: &PointMatrix, target_dim: usize, seed: u64) -> Result<PointMatrix> {
    let (n, d) = (points.rows(), points.cols());
    if target_dim == 0 || target_dim > n.min(d) {
        return Err(Error::InvalidParameter(format!(
            "target_dim = {target_dim} must be in 1..={}",
            n.min(d)
        )));
    }
    let mut centered = DMatrix::from_row_slice(n, d, points.as_slice());
    for mut col in centered.column_iter_mut() {
        let mean = col.sum() / n as f64;
        col.add_scalar_mut(-mean);
    }

    let components = if d <= DENSE_PCA_MAX_COLS {
        dense_components(&centered, target_dim)
    } else {
        randomized_components(&centered, target_dim, seed)
    };
    let projected = &centered * &components;
    let mut data = Vec::with_capacity(n * target_dim);
    for i in 0..n {
        data.extend(projected.row(i).iter().copied());
    }
    PointMatrix::new(n, target_dim, data)
}

fn fix_sign(mut components: DMatrix<f64>) -> DMatrix<f64> {
    for mut col in components.column_iter_mut() {
        let mut best = 0usize;
        for (i, x) in col.iter().enumerate() {
            if x.abs() > col[best].abs() {
                best = i;
            }
        }
        if col[best] < 0.0 {
            col.neg_mut();
        }
    }
    components
}

fn dense_components(centered: &DMatrix<f64>, target_dim: usize) -> DMatrix<f64> {
    let n = centered.nrows();
    let covariance = centered.transpose() * centered / (n.max(2) - 1) as f64;
    let eigen = SymmetricEigen::new(covariance);
    let mut order: Vec<usize> = (0..eigen.eigenvalues.len()).collect();
    order.sort_by(|&a, &b| {
        eigen.eigenvalues[b]
            .total_cmp(&eigen.eigenvalues[a])
            .then(a.cmp(&b))
    });
    let picked: Vec<_> = order[..target_dim]
        .iter()
        .map(|&i| eigen.eigenvectors.column(i).into_owned())
        .collect();
    fix_sign(DMatrix::from_columns(&picked))
}

fn randomized_components(centered: &DMatrix<f64>, target_dim: usize, seed: u64) -> DMatrix<f64> {
    let (n, d) = centered.shape();
    let width = (target_dim + 10).min(n).min(d);
    let mut rng = stream_rng(seed, 0);
    let omega = DMatrix::from_fn(d, width, |_, _| rng.sample::<f64, _>(StandardNormal));
    let mut basis = (centered * omega).qr().q();
    for _ in 0..2 {
        let back = (centered.transpose() * &basis).qr().q();
        basis = (centered * back).qr().q();
    }
    let small = basis.transpose() * centered;
    let svd = small.svd(false, true);
    let v_t = svd.v_t.expect("requested right singular vectors");
    let mut order: Vec<usize> = (0..svd.singular_values.len()).collect();
    order.sort_by(|&a, &b| {
        svd.singular_values[b]
            .total_cmp(&svd.singular_values[a])
            .then(a.cmp(&b))
    });
    let picked: Vec<_> = order[..target_dim]
        .iter()
        .map(|&i| v_t.row(i).transpose())
        .collect();
    fix_sign(DMatrix::from_columns(&picked))
}
