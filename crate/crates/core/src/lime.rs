//! Sampling-based local linear surrogates, used as a comparison baseline.
//!
//! Each instance is explained by perturbing it with per-feature Gaussian noise
//! scaled by the fitted column stds, weighting samples with an exponential
//! kernel on z-scored distance, choosing `K` features by forward selection and
//! fitting weighted least squares on them. The interpretable representation is
//! the z-scored feature vector itself.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use serde::Serialize;

use crate::error::{PieError, Result};
use crate::linalg::cholesky_solve;
use crate::par::Execution;
use crate::standardize::StandardizationStats;
use crate::table::ObservationTable;

/// Samples whose kernel weights are all below this are unusable.
pub const MIN_KERNEL_WEIGHT: f64 = 1e-12;

/// A deterministic scoring function of one m-vector.
pub trait BlackBox: Sync {
    fn evaluate(&self, x: &[f64]) -> f64;
}

impl<F> BlackBox for F
where
    F: Fn(&[f64]) -> f64 + Sync,
{
    fn evaluate(&self, x: &[f64]) -> f64 {
        self(x)
    }
}

#[derive(Debug, Clone)]
pub struct LinearModel {
    pub weights: Vec<f64>,
    pub intercept: f64,
}

impl BlackBox for LinearModel {
    fn evaluate(&self, x: &[f64]) -> f64 {
        self.intercept + self.weights.iter().zip(x).map(|(w, v)| w * v).sum::<f64>()
    }
}

/// Returns the score of the nearest reference row (z-scored Euclidean
/// distance, ties to the lowest row index).
#[derive(Debug, Clone)]
pub struct LookupModel {
    reference: ObservationTable,
    scores: Vec<f64>,
    stats: StandardizationStats,
}

impl LookupModel {
    pub fn new(
        reference: ObservationTable,
        scores: Vec<f64>,
        stats: StandardizationStats,
    ) -> Result<Self> {
        if scores.len() != reference.n_rows() {
            return Err(PieError::DimensionMismatch {
                expected: reference.n_rows(),
                found: scores.len(),
            });
        }
        if stats.n_cols() != reference.n_cols() {
            return Err(PieError::DimensionMismatch {
                expected: reference.n_cols(),
                found: stats.n_cols(),
            });
        }
        Ok(Self {
            reference,
            scores,
            stats,
        })
    }
}

impl BlackBox for LookupModel {
    fn evaluate(&self, x: &[f64]) -> f64 {
        let mut best = (f64::INFINITY, 0);
        for (i, row) in self.reference.rows().enumerate() {
            let d: f64 = row
                .iter()
                .zip(x)
                .enumerate()
                .map(|(k, (&r, &v))| {
                    let diff = self.stats.zscore(k, r) - self.stats.zscore(k, v);
                    diff * diff
                })
                .sum();
            if d < best.0 {
                best = (d, i);
            }
        }
        self.scores[best.1]
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct LimeParams {
    pub n_samples: usize,
    pub k_features: usize,
    /// `None` means `0.75 * sqrt(m)`.
    pub kernel_width: Option<f64>,
    pub seed: u64,
}

impl Default for LimeParams {
    fn default() -> Self {
        Self {
            n_samples: 500,
            k_features: 3,
            kernel_width: None,
            seed: 42,
        }
    }
}

impl LimeParams {
    pub fn resolved_width(&self, m: usize) -> f64 {
        self.kernel_width
            .unwrap_or_else(|| 0.75 * (m as f64).sqrt())
    }

    fn validate(&self, m: usize) -> Result<f64> {
        if self.k_features == 0 {
            return Err(PieError::InvalidParameter(
                "number of explanation features must be at least 1".into(),
            ));
        }
        if self.n_samples < self.k_features + 1 {
            return Err(PieError::InvalidParameter(format!(
                "samples ({}) must be at least k-features + 1 ({})",
                self.n_samples,
                self.k_features + 1
            )));
        }
        let width = self.resolved_width(m);
        if !(width > 0.0 && width.is_finite()) {
            return Err(PieError::InvalidParameter(format!(
                "kernel width must be positive, got {width}"
            )));
        }
        Ok(width)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct LocalExplanation {
    pub instance: usize,
    /// Selected feature names, in selection order.
    pub selected: Vec<String>,
    pub selected_indices: Vec<usize>,
    pub weights: Vec<f64>,
    pub intercept: f64,
    pub samples_used: usize,
    pub kernel_width: f64,
}

impl LocalExplanation {
    /// Weights scattered into a full-width row; unselected features are 0.
    pub fn dense(&self, m: usize) -> Vec<f64> {
        let mut row = vec![0.0; m];
        for (&k, &w) in self.selected_indices.iter().zip(&self.weights) {
            row[k] = w;
        }
        row
    }
}

/// Weighted, centered second moments of the perturbation sample.
struct WeightedMoments {
    m: usize,
    gram: Vec<f64>,
    cross: Vec<f64>,
    yy: f64,
    x_mean: Vec<f64>,
    y_mean: f64,
}

impl WeightedMoments {
    fn new(design: &[Vec<f64>], y: &[f64], w: &[f64], m: usize) -> Self {
        let total: f64 = w.iter().sum();
        let mut x_mean = vec![0.0; m];
        let mut y_mean = 0.0;
        for ((row, &yi), &wi) in design.iter().zip(y).zip(w) {
            for k in 0..m {
                x_mean[k] += wi * row[k];
            }
            y_mean += wi * yi;
        }
        x_mean.iter_mut().for_each(|v| *v /= total);
        y_mean /= total;

        let mut gram = vec![0.0; m * m];
        let mut cross = vec![0.0; m];
        let mut yy = 0.0;
        let mut centered = vec![0.0; m];
        for ((row, &yi), &wi) in design.iter().zip(y).zip(w) {
            for k in 0..m {
                centered[k] = row[k] - x_mean[k];
            }
            let dy = yi - y_mean;
            yy += wi * dy * dy;
            for a in 0..m {
                cross[a] += wi * centered[a] * dy;
                for b in a..m {
                    gram[a * m + b] += wi * centered[a] * centered[b];
                }
            }
        }
        for a in 0..m {
            for b in 0..a {
                gram[a * m + b] = gram[b * m + a];
            }
        }
        Self {
            m,
            gram,
            cross,
            yy,
            x_mean,
            y_mean,
        }
    }

    /// Weighted least squares on `cols`; returns (coefficients, intercept, rss).
    /// Columns without weighted variance get a zero coefficient.
    fn fit(&self, cols: &[usize]) -> Option<(Vec<f64>, f64, f64)> {
        let tol = 1e-12
            * self
                .gram
                .iter()
                .step_by(self.m + 1)
                .fold(0.0, |a: f64, &b| a.max(b));
        let live: Vec<usize> = cols
            .iter()
            .copied()
            .filter(|&k| self.gram[k * self.m + k] > tol)
            .collect();
        let p = live.len();
        let mut sub = vec![0.0; p * p];
        let mut rhs = vec![0.0; p];
        for (a, &ka) in live.iter().enumerate() {
            rhs[a] = self.cross[ka];
            for (b, &kb) in live.iter().enumerate() {
                sub[a * p + b] = self.gram[ka * self.m + kb];
            }
        }
        let beta = if p == 0 {
            Vec::new()
        } else {
            cholesky_solve(&sub, &rhs, p)?
        };
        let explained: f64 = beta.iter().zip(&rhs).map(|(b, r)| b * r).sum();
        let rss = (self.yy - explained).max(0.0);

        let mut coef = vec![0.0; cols.len()];
        for (&k, b) in live.iter().zip(&beta) {
            let pos = cols.iter().position(|&c| c == k).unwrap();
            coef[pos] = *b;
        }
        let intercept = self.y_mean
            - cols
                .iter()
                .zip(&coef)
                .map(|(&k, c)| c * self.x_mean[k])
                .sum::<f64>();
        Some((coef, intercept, rss))
    }
}

fn singular() -> PieError {
    PieError::DegenerateSampling("weighted design matrix is singular".into())
}

/// Perturbation sample around one instance.
#[derive(Debug, Clone, PartialEq)]
pub struct PerturbationSample {
    /// z-scored coordinates of each perturbed point.
    pub design: Vec<Vec<f64>>,
    /// Black-box score of each perturbed point.
    pub target: Vec<f64>,
    /// Kernel weight `exp(-d² / width²)`, `d` the z-scored distance to `x`.
    pub kernel: Vec<f64>,
}

/// Draws `params.n_samples` Gaussian perturbations of `x` with per-feature
/// std taken from `stats`, using a ChaCha8 stream seeded with `params.seed`.
/// Normals are drawn feature by feature within each sample, constant columns
/// included, so the stream layout depends only on n and m.
pub fn perturbation_sample(
    model: &dyn BlackBox,
    x: &[f64],
    stats: &StandardizationStats,
    params: &LimeParams,
) -> Result<PerturbationSample> {
    let m = stats.n_cols();
    if x.len() != m {
        return Err(PieError::DimensionMismatch {
            expected: m,
            found: x.len(),
        });
    }
    let width = params.validate(m)?;
    let n = params.n_samples;

    let mut rng = ChaCha8Rng::seed_from_u64(params.seed);
    let mut design = Vec::with_capacity(n);
    let mut target = Vec::with_capacity(n);
    let mut kernel = Vec::with_capacity(n);
    let mut z = vec![0.0; m];
    for _ in 0..n {
        let mut dist2 = 0.0;
        for k in 0..m {
            let eps: f64 = StandardNormal.sample(&mut rng);
            let sd = stats.col_stds[k];
            z[k] = x[k] + eps * sd;
            if sd > 0.0 {
                dist2 += eps * eps;
            }
        }
        kernel.push((-dist2 / (width * width)).exp());
        target.push(model.evaluate(&z));
        design.push((0..m).map(|k| stats.zscore(k, z[k])).collect::<Vec<f64>>());
    }
    Ok(PerturbationSample {
        design,
        target,
        kernel,
    })
}

/// Local linear explanation of `model` around the instance `x`.
pub fn explain_instance(
    model: &dyn BlackBox,
    x: &[f64],
    stats: &StandardizationStats,
    params: &LimeParams,
    instance: usize,
) -> Result<LocalExplanation> {
    let m = stats.n_cols();
    let PerturbationSample {
        design,
        target,
        kernel,
    } = perturbation_sample(model, x, stats, params)?;
    let n = params.n_samples;
    let width = params.resolved_width(m);
    if kernel.iter().all(|&w| w < MIN_KERNEL_WEIGHT) {
        return Err(PieError::DegenerateSampling(format!(
            "all {n} kernel weights are below {MIN_KERNEL_WEIGHT:e} (kernel width {width})"
        )));
    }

    let moments = WeightedMoments::new(&design, &target, &kernel, m);
    let k = params.k_features.min(m);
    let selected: Vec<usize> = if k == m {
        (0..m).collect()
    } else {
        let mut chosen: Vec<usize> = Vec::with_capacity(k);
        while chosen.len() < k {
            let mut best: Option<(f64, usize)> = None;
            for j in (0..m).filter(|j| !chosen.contains(j)) {
                let mut trial = chosen.clone();
                trial.push(j);
                let (_, _, rss) = moments.fit(&trial).ok_or_else(singular)?;
                if best.is_none_or(|(r, _)| rss < r) {
                    best = Some((rss, j));
                }
            }
            chosen.push(best.expect("candidate set is non-empty").1);
        }
        chosen
    };
    let (weights, intercept, _) = moments.fit(&selected).ok_or_else(singular)?;

    Ok(LocalExplanation {
        instance,
        selected: selected
            .iter()
            .map(|&k| stats.column_names[k].clone())
            .collect(),
        selected_indices: selected,
        weights,
        intercept,
        samples_used: n,
        kernel_width: width,
    })
}

/// Explanations for every row, plus the dense n×m weight matrix.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ExplanationMatrix {
    pub column_names: Vec<String>,
    pub explanations: Vec<LocalExplanation>,
    pub weights: Vec<Vec<f64>>,
}

/// Explains every row of `table`; row `i` uses seed `params.seed + i`.
pub fn explanation_matrix(
    model: &dyn BlackBox,
    table: &ObservationTable,
    stats: &StandardizationStats,
    params: &LimeParams,
) -> Result<ExplanationMatrix> {
    explanation_matrix_with(model, table, stats, params, Execution::default())
}

pub fn explanation_matrix_with(
    model: &dyn BlackBox,
    table: &ObservationTable,
    stats: &StandardizationStats,
    params: &LimeParams,
    exec: Execution,
) -> Result<ExplanationMatrix> {
    if table.column_names() != stats.column_names.as_slice() {
        return Err(PieError::ColumnMismatch {
            expected: stats.column_names.clone(),
            found: table.column_names().to_vec(),
        });
    }
    let m = table.n_cols();
    let explanations = exec.try_map(table.n_rows(), |i| {
        let row_params = LimeParams {
            seed: params.seed.wrapping_add(i as u64),
            ..params.clone()
        };
        explain_instance(model, table.row(i), stats, &row_params, i)
    })?;
    let weights = explanations.iter().map(|e| e.dense(m)).collect();
    Ok(ExplanationMatrix {
        column_names: table.column_names().to_vec(),
        explanations,
        weights,
    })
}
