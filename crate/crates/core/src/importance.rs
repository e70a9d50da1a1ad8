//! Built-in estimators producing a global importance vector from labeled data.

use crate::error::{PieError, Result};
use crate::linalg::{cholesky_solve, symmetric_eigen};
use crate::standardize::mean_std;
use crate::table::{FeatureImportance, ObservationTable};

/// Condition estimates of the normal matrix above this are rejected.
pub const MAX_CONDITION: f64 = 1e8;

/// Features plus a real-valued target `Y` (0/1 for binary outcomes).
#[derive(Debug, Clone)]
pub struct LabeledTable {
    features: ObservationTable,
    target: Vec<f64>,
}

impl LabeledTable {
    pub fn new(features: ObservationTable, target: Vec<f64>) -> Result<Self> {
        if target.len() != features.n_rows() {
            return Err(PieError::DimensionMismatch {
                expected: features.n_rows(),
                found: target.len(),
            });
        }
        if let Some(i) = target.iter().position(|y| !y.is_finite()) {
            return Err(PieError::NonFinite {
                row: i + 1,
                column: 0,
                name: "target".into(),
                value: target[i].to_string(),
            });
        }
        Ok(Self { features, target })
    }

    /// Splits the named column off `table` as the target.
    pub fn from_table(table: &ObservationTable, target: &str) -> Result<Self> {
        let (features, y) = table.split_column(target)?;
        Self::new(features, y)
    }

    pub fn features(&self) -> &ObservationTable {
        &self.features
    }

    pub fn target(&self) -> &[f64] {
        &self.target
    }

    fn check_target(&self) -> Result<()> {
        if mean_std(&self.target).1 == 0.0 {
            return Err(PieError::ConstantTarget);
        }
        Ok(())
    }
}

/// Standardized least-squares coefficients.
///
/// Fits `Y` on z-scored features plus an intercept through the normal
/// equations and discards the intercept. Coefficients are in units of `Y` per
/// feature standard deviation, so they compare across features.
pub fn ols_importance(data: &LabeledTable) -> Result<FeatureImportance> {
    let x = &data.features;
    let (n, m) = (x.n_rows(), x.n_cols());
    if n <= m {
        return Err(PieError::TooFew {
            what: "least-squares fit (rows must exceed features)",
            needed: m + 1,
            got: n,
        });
    }
    data.check_target()?;

    let stats: Vec<(f64, f64)> = (0..m).map(|k| mean_std(&x.column(k))).collect();
    let constant: Vec<String> = stats
        .iter()
        .zip(x.column_names())
        .filter(|((_, s), _)| *s == 0.0)
        .map(|(_, name)| name.clone())
        .collect();
    if !constant.is_empty() {
        return Err(PieError::RankDeficient {
            condition: f64::INFINITY,
            columns: constant,
        });
    }

    // design row: [1, z_1, ..., z_m]
    let p = m + 1;
    let mut gram = vec![0.0; p * p];
    let mut rhs = vec![0.0; p];
    let mut design = vec![0.0; p];
    for (row, &y) in x.rows().zip(&data.target) {
        design[0] = 1.0;
        for k in 0..m {
            design[k + 1] = (row[k] - stats[k].0) / stats[k].1;
        }
        for a in 0..p {
            rhs[a] += design[a] * y;
            for b in a..p {
                gram[a * p + b] += design[a] * design[b];
            }
        }
    }
    for a in 0..p {
        for b in 0..a {
            gram[a * p + b] = gram[b * p + a];
        }
    }

    let (eigvals, eigvecs) = symmetric_eigen(&gram, p);
    let lo = eigvals[0];
    let hi = eigvals[p - 1];
    let condition = if lo > 0.0 { hi / lo } else { f64::INFINITY };
    if condition > MAX_CONDITION {
        return Err(PieError::RankDeficient {
            condition,
            columns: weak_direction_columns(&eigvecs[0], x.column_names()),
        });
    }
    let coef = cholesky_solve(&gram, &rhs, p).ok_or_else(|| PieError::RankDeficient {
        condition,
        columns: weak_direction_columns(&eigvecs[0], x.column_names()),
    })?;
    FeatureImportance::new(x.column_names().to_vec(), coef[1..].to_vec())
}

/// Columns with a material loading on the near-null direction of the design.
fn weak_direction_columns(v: &[f64], names: &[String]) -> Vec<String> {
    v[1..]
        .iter()
        .zip(names)
        .filter(|(c, _)| c.abs() > 0.1)
        .map(|(_, n)| n.clone())
        .collect()
}

/// `|Pearson correlation(x_k, Y)|` for every feature.
pub fn correlation_importance(data: &LabeledTable) -> Result<FeatureImportance> {
    data.check_target()?;
    let x = &data.features;
    let (ybar, _) = mean_std(&data.target);
    let dy: Vec<f64> = data.target.iter().map(|y| y - ybar).collect();
    let syy: f64 = dy.iter().map(|d| d * d).sum();

    let mut constant = Vec::new();
    let mut beta = Vec::with_capacity(x.n_cols());
    for (k, name) in x.column_names().iter().enumerate() {
        let col = x.column(k);
        let (xbar, sx) = mean_std(&col);
        if sx == 0.0 {
            constant.push(name.clone());
            continue;
        }
        let mut sxy = 0.0;
        let mut sxx = 0.0;
        for (xi, d) in col.iter().zip(&dy) {
            let dx = xi - xbar;
            sxy += dx * d;
            sxx += dx * dx;
        }
        beta.push((sxy / (sxx * syy).sqrt()).abs().min(1.0));
    }
    if !constant.is_empty() {
        return Err(PieError::ConstantFeatures(constant));
    }
    FeatureImportance::new(x.column_names().to_vec(), beta)
}
