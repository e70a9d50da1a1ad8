//! Per-observation influence weights and key-driver reports.
//!
//! For every row `i` the clipped products `p_ik = β_k · x_ik` are summed left
//! to right into `S_i`. Rows with `S_i > 0` are active and get
//! `W_ik = p_ik / S_i`; rows with `S_i = 0` have no positive product, stay
//! all-zero and are reported as degenerate.
//!
//! The driver of an active row is `argmax_k W_ik` with ties going to the
//! smallest column index. Since `S_i > 0`, this is also `argmax_k W_ik / S_i`.

use std::cmp::Ordering;

use serde::Serialize;

use crate::error::{PieError, Result};
use crate::par::Execution;
use crate::standardize::{
    standardize_columns_with, standardize_importance, StandardizationStats, StandardizedImportance,
};
use crate::table::{align, FeatureImportance, ObservationTable};

/// Row-normalized influence weights `W`, row sums `S` and activity flags.
#[derive(Debug, Clone, PartialEq)]
pub struct InfluenceMatrix {
    weights: Vec<f64>,
    row_sums: Vec<f64>,
    active: Vec<bool>,
    n_cols: usize,
}

impl InfluenceMatrix {
    pub fn n_rows(&self) -> usize {
        self.row_sums.len()
    }

    pub fn n_cols(&self) -> usize {
        self.n_cols
    }

    pub fn row(&self, i: usize) -> &[f64] {
        &self.weights[i * self.n_cols..(i + 1) * self.n_cols]
    }

    pub fn weight(&self, i: usize, k: usize) -> f64 {
        self.weights[i * self.n_cols + k]
    }

    pub fn row_sums(&self) -> &[f64] {
        &self.row_sums
    }

    pub fn is_active(&self, i: usize) -> bool {
        self.active[i]
    }

    pub fn active(&self) -> &[bool] {
        &self.active
    }

    /// Builds the matrix from per-row non-negative products.
    fn from_product_rows(rows: Vec<Vec<f64>>, n_cols: usize) -> Self {
        let n = rows.len();
        let mut weights = Vec::with_capacity(n * n_cols);
        let mut row_sums = Vec::with_capacity(n);
        let mut active = Vec::with_capacity(n);
        for products in rows {
            let (w, s, a) = normalize_row(&products);
            weights.extend(w);
            row_sums.push(s);
            active.push(a);
        }
        Self {
            weights,
            row_sums,
            active,
            n_cols,
        }
    }
}

fn normalize_row(products: &[f64]) -> (Vec<f64>, f64, bool) {
    let s: f64 = products.iter().sum();
    if s > 0.0 {
        (products.iter().map(|p| p / s).collect(), s, true)
    } else {
        (vec![0.0; products.len()], 0.0, false)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Driver {
    pub feature: String,
    pub weight: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DriverEntry {
    pub row_index: usize,
    pub row_id: String,
    pub top_driver: Option<String>,
    /// Strictly positive weights, descending; ties by column index.
    pub ranked: Vec<Driver>,
    pub degenerate: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PieReport {
    pub entries: Vec<DriverEntry>,
}

impl PieReport {
    /// Replaces the default 1-based row labels with the table's row labels.
    pub fn with_row_labels(mut self, table: &ObservationTable) -> Self {
        for e in &mut self.entries {
            e.row_id = table.row_label(e.row_index);
        }
        self
    }

    pub fn degenerate_rows(&self) -> Vec<usize> {
        self.entries
            .iter()
            .filter(|e| e.degenerate)
            .map(|e| e.row_index)
            .collect()
    }

    pub fn top_driver_indices(&self, names: &[String]) -> Vec<Option<usize>> {
        self.entries
            .iter()
            .map(|e| {
                e.top_driver
                    .as_ref()
                    .and_then(|d| names.iter().position(|n| n == d))
            })
            .collect()
    }
}

/// Influence matrix from clipped standardized importance and clipped
/// standardized data. All inputs must be non-negative.
pub fn influence_matrix(beta_std: &[f64], x_std: &ObservationTable) -> Result<InfluenceMatrix> {
    influence_matrix_with(beta_std, x_std, Execution::default())
}

pub fn influence_matrix_with(
    beta_std: &[f64],
    x_std: &ObservationTable,
    exec: Execution,
) -> Result<InfluenceMatrix> {
    let m = x_std.n_cols();
    if beta_std.len() != m {
        return Err(PieError::DimensionMismatch {
            expected: m,
            found: beta_std.len(),
        });
    }
    if let Some((k, &b)) = beta_std.iter().enumerate().find(|(_, b)| **b < 0.0) {
        return Err(PieError::NegativeInput {
            what: "standardized importance",
            index: k,
            value: b,
        });
    }
    for (i, row) in x_std.rows().enumerate() {
        if let Some((k, &v)) = row.iter().enumerate().find(|(_, v)| **v < 0.0) {
            return Err(PieError::NegativeInput {
                what: "standardized table",
                index: i * m + k,
                value: v,
            });
        }
    }
    let rows = exec.map(x_std.n_rows(), |i| {
        x_std
            .row(i)
            .iter()
            .zip(beta_std)
            .map(|(x, b)| b * x)
            .collect::<Vec<f64>>()
    });
    Ok(InfluenceMatrix::from_product_rows(rows, m))
}

/// Influence matrix on raw values: negative products are clipped to zero.
pub fn raw_influence_matrix(
    beta: &[f64],
    table: &ObservationTable,
    exec: Execution,
) -> Result<InfluenceMatrix> {
    let m = table.n_cols();
    if beta.len() != m {
        return Err(PieError::DimensionMismatch {
            expected: m,
            found: beta.len(),
        });
    }
    let rows = exec.map(table.n_rows(), |i| {
        table
            .row(i)
            .iter()
            .zip(beta)
            .map(|(x, b)| (b * x).max(0.0))
            .collect::<Vec<f64>>()
    });
    Ok(InfluenceMatrix::from_product_rows(rows, m))
}

fn check_names(w: &InfluenceMatrix, names: &[String]) -> Result<()> {
    if names.len() != w.n_cols() {
        return Err(PieError::DimensionMismatch {
            expected: w.n_cols(),
            found: names.len(),
        });
    }
    Ok(())
}

/// Index of the largest entry; ties go to the smallest index.
fn argmax(row: &[f64]) -> usize {
    let mut best = 0;
    for (k, &v) in row.iter().enumerate().skip(1) {
        if v > row[best] {
            best = k;
        }
    }
    best
}

/// Report holding only the top driver of each active row.
pub fn pie_argmax(w: &InfluenceMatrix, names: &[String]) -> Result<PieReport> {
    check_names(w, names)?;
    let entries = (0..w.n_rows())
        .map(|i| {
            if !w.is_active(i) {
                return degenerate_entry(i);
            }
            let k = argmax(w.row(i));
            DriverEntry {
                row_index: i,
                row_id: (i + 1).to_string(),
                top_driver: Some(names[k].clone()),
                ranked: vec![Driver {
                    feature: names[k].clone(),
                    weight: w.weight(i, k),
                }],
                degenerate: false,
            }
        })
        .collect();
    Ok(PieReport { entries })
}

fn degenerate_entry(i: usize) -> DriverEntry {
    DriverEntry {
        row_index: i,
        row_id: (i + 1).to_string(),
        top_driver: None,
        ranked: Vec::new(),
        degenerate: true,
    }
}

/// Up to `k` strictly positive drivers per row, heaviest first.
pub fn top_k_drivers(w: &InfluenceMatrix, names: &[String], k: usize) -> Result<PieReport> {
    check_names(w, names)?;
    if k == 0 {
        return Err(PieError::InvalidParameter(
            "top-k must be at least 1".into(),
        ));
    }
    let entries = (0..w.n_rows())
        .map(|i| {
            if !w.is_active(i) {
                return degenerate_entry(i);
            }
            let row = w.row(i);
            let mut idx: Vec<usize> = (0..row.len()).filter(|&j| row[j] > 0.0).collect();
            idx.sort_by(|&a, &b| match row[b].total_cmp(&row[a]) {
                Ordering::Equal => a.cmp(&b),
                o => o,
            });
            idx.truncate(k);
            let ranked: Vec<Driver> = idx
                .iter()
                .map(|&j| Driver {
                    feature: names[j].clone(),
                    weight: row[j],
                })
                .collect();
            DriverEntry {
                row_index: i,
                row_id: (i + 1).to_string(),
                top_driver: ranked.first().map(|d| d.feature.clone()),
                ranked,
                degenerate: false,
            }
        })
        .collect();
    Ok(PieReport { entries })
}

/// Everything produced by the standardized scoring path.
#[derive(Debug, Clone)]
pub struct StandardizedPie {
    pub report: PieReport,
    pub influence: InfluenceMatrix,
    pub stats: StandardizationStats,
    pub importance: StandardizedImportance,
}

/// Standardize and clip importance and columns, then score every row.
pub fn pie_standardized(
    imp: &FeatureImportance,
    table: &ObservationTable,
    k: usize,
) -> Result<StandardizedPie> {
    pie_standardized_with(imp, table, k, Execution::default())
}

pub fn pie_standardized_with(
    imp: &FeatureImportance,
    table: &ObservationTable,
    k: usize,
    exec: Execution,
) -> Result<StandardizedPie> {
    if k == 0 {
        return Err(PieError::InvalidParameter(
            "top-k must be at least 1".into(),
        ));
    }
    let imp = align(imp, table)?;
    let importance = standardize_importance(&imp)?;
    let (x_std, mut stats) = standardize_columns_with(table, exec)?;
    stats.beta_mean = Some(importance.mean);
    stats.beta_std = Some(importance.std);
    let influence = influence_matrix_with(&importance.values, &x_std, exec)?;
    let report = top_k_drivers(&influence, table.column_names(), k)?.with_row_labels(table);
    Ok(StandardizedPie {
        report,
        influence,
        stats,
        importance,
    })
}

/// Score on raw values without any standardization.
pub fn pie_raw(
    imp: &FeatureImportance,
    table: &ObservationTable,
    k: usize,
) -> Result<(PieReport, InfluenceMatrix)> {
    pie_raw_with(imp, table, k, Execution::default())
}

pub fn pie_raw_with(
    imp: &FeatureImportance,
    table: &ObservationTable,
    k: usize,
    exec: Execution,
) -> Result<(PieReport, InfluenceMatrix)> {
    if k == 0 {
        return Err(PieError::InvalidParameter(
            "top-k must be at least 1".into(),
        ));
    }
    let imp = align(imp, table)?;
    let influence = raw_influence_matrix(imp.beta(), table, exec)?;
    let report = top_k_drivers(&influence, table.column_names(), k)?.with_row_labels(table);
    Ok((report, influence))
}
