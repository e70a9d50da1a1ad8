//! Z-scoring with clip-at-zero for importances and feature columns.
//!
//! Standard deviations are sample deviations (divisor `len - 1`). All sums run
//! left to right over a single column or vector, so the result does not depend
//! on how columns are scheduled across threads.

use serde::{Deserialize, Serialize};

use crate::error::{PieError, Result};
use crate::par::Execution;
use crate::table::{FeatureImportance, ObservationTable};

/// Fitted per-column statistics plus, once known, the importance statistics.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StandardizationStats {
    pub column_names: Vec<String>,
    pub col_means: Vec<f64>,
    pub col_stds: Vec<f64>,
    pub beta_mean: Option<f64>,
    pub beta_std: Option<f64>,
    /// Indices of columns whose values are all equal; their std is exactly 0.
    pub constant_columns: Vec<usize>,
}

impl StandardizationStats {
    pub fn n_cols(&self) -> usize {
        self.col_means.len()
    }

    pub fn is_constant(&self, k: usize) -> bool {
        self.col_stds[k] == 0.0
    }

    /// Unclipped z-score of `value` in column `k`; 0 for constant columns.
    pub fn zscore(&self, k: usize, value: f64) -> f64 {
        let s = self.col_stds[k];
        if s == 0.0 {
            0.0
        } else {
            (value - self.col_means[k]) / s
        }
    }
}

/// Clipped standardized importance with the statistics used to produce it.
#[derive(Debug, Clone, PartialEq)]
pub struct StandardizedImportance {
    pub column_names: Vec<String>,
    pub values: Vec<f64>,
    pub mean: f64,
    pub std: f64,
}

/// Mean and sample std with left-to-right summation. A sequence whose values
/// are all identical gets std exactly 0.
pub(crate) fn mean_std(xs: &[f64]) -> (f64, f64) {
    let n = xs.len() as f64;
    let mean = xs.iter().sum::<f64>() / n;
    if xs.iter().all(|&x| x == xs[0]) {
        return (mean, 0.0);
    }
    let ss: f64 = xs.iter().map(|&x| (x - mean) * (x - mean)).sum();
    (mean, (ss / (n - 1.0)).sqrt())
}

#[inline]
fn clip(z: f64) -> f64 {
    // max(0, z); also maps -0.0 to 0.0
    if z > 0.0 {
        z
    } else {
        0.0
    }
}

/// `max(0, (β_k − β̄) / σ_β)` for every k.
pub fn standardize_importance(imp: &FeatureImportance) -> Result<StandardizedImportance> {
    let beta = imp.beta();
    if beta.len() < 2 {
        return Err(PieError::TooFew {
            what: "importance standardization",
            needed: 2,
            got: beta.len(),
        });
    }
    let (mean, std) = mean_std(beta);
    if std == 0.0 {
        return Err(PieError::ConstantImportance);
    }
    let values = beta.iter().map(|&b| clip((b - mean) / std)).collect();
    Ok(StandardizedImportance {
        column_names: imp.column_names().to_vec(),
        values,
        mean,
        std,
    })
}

/// Fits column means and sample stds. Needs at least two rows.
pub fn fit_column_stats(table: &ObservationTable) -> Result<StandardizationStats> {
    fit_column_stats_with(table, Execution::default())
}

pub fn fit_column_stats_with(
    table: &ObservationTable,
    exec: Execution,
) -> Result<StandardizationStats> {
    let n = table.n_rows();
    if n < 2 {
        return Err(PieError::TooFew {
            what: "column standardization",
            needed: 2,
            got: n,
        });
    }
    let per_col = exec.map(table.n_cols(), |k| mean_std(&table.column(k)));
    let (col_means, col_stds): (Vec<f64>, Vec<f64>) = per_col.into_iter().unzip();
    let constant_columns = col_stds
        .iter()
        .enumerate()
        .filter(|&(_, &s)| s == 0.0)
        .map(|(k, _)| k)
        .collect();
    Ok(StandardizationStats {
        column_names: table.column_names().to_vec(),
        col_means,
        col_stds,
        beta_mean: None,
        beta_std: None,
        constant_columns,
    })
}

/// Standardizes and clips every column; constant columns become all zero.
pub fn standardize_columns(
    table: &ObservationTable,
) -> Result<(ObservationTable, StandardizationStats)> {
    standardize_columns_with(table, Execution::default())
}

pub fn standardize_columns_with(
    table: &ObservationTable,
    exec: Execution,
) -> Result<(ObservationTable, StandardizationStats)> {
    let stats = fit_column_stats_with(table, exec)?;
    let out = transform(table, &stats, exec, true);
    Ok((out, stats))
}

/// Applies frozen statistics to new rows (any n ≥ 1), clipping at zero.
pub fn apply_stats(
    table: &ObservationTable,
    stats: &StandardizationStats,
) -> Result<ObservationTable> {
    check_columns(table, stats)?;
    Ok(transform(table, stats, Execution::default(), true))
}

/// Applies frozen statistics without clipping.
pub fn zscore_table(
    table: &ObservationTable,
    stats: &StandardizationStats,
) -> Result<ObservationTable> {
    check_columns(table, stats)?;
    Ok(transform(table, stats, Execution::default(), false))
}

fn check_columns(table: &ObservationTable, stats: &StandardizationStats) -> Result<()> {
    if table.column_names() != stats.column_names.as_slice() {
        return Err(PieError::ColumnMismatch {
            expected: stats.column_names.clone(),
            found: table.column_names().to_vec(),
        });
    }
    Ok(())
}

fn transform(
    table: &ObservationTable,
    stats: &StandardizationStats,
    exec: Execution,
    clipped: bool,
) -> ObservationTable {
    let rows = exec.map(table.n_rows(), |i| {
        table
            .row(i)
            .iter()
            .enumerate()
            .map(|(k, &v)| {
                let z = stats.zscore(k, v);
                if clipped {
                    clip(z)
                } else {
                    z
                }
            })
            .collect::<Vec<f64>>()
    });
    ObservationTable::from_parts_unchecked(
        table.column_names().to_vec(),
        rows.concat(),
        table.n_rows(),
        table.row_ids().map(<[String]>::to_vec),
    )
}
