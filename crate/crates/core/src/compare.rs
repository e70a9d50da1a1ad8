//! Agreement between PIE top drivers and local surrogate explanations.

use serde::Serialize;

use crate::error::{PieError, Result};
use crate::influence::PieReport;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RowAgreement {
    pub row_index: usize,
    pub pie_driver: String,
    /// The driver has a nonzero surrogate weight.
    pub in_selected: bool,
    /// Feature with the largest absolute surrogate weight.
    pub surrogate_top: Option<String>,
    pub matches_top: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Agreement {
    pub active_rows: usize,
    pub selected_fraction: f64,
    pub top_fraction: f64,
    pub rows: Vec<RowAgreement>,
}

/// Compares on active rows only; fractions are 0 when no row is active.
///
/// `expl` is the dense explanation matrix (zero where a feature was not
/// selected) and `names` its column names.
pub fn compare_with_pie(
    report: &PieReport,
    expl: &[Vec<f64>],
    names: &[String],
) -> Result<Agreement> {
    if report.entries.len() != expl.len() {
        return Err(PieError::DimensionMismatch {
            expected: report.entries.len(),
            found: expl.len(),
        });
    }
    let mut rows = Vec::new();
    for (entry, w) in report.entries.iter().zip(expl) {
        let Some(driver) = &entry.top_driver else {
            continue;
        };
        if w.len() != names.len() {
            return Err(PieError::DimensionMismatch {
                expected: names.len(),
                found: w.len(),
            });
        }
        let k = names
            .iter()
            .position(|n| n == driver)
            .ok_or_else(|| PieError::UnknownColumn(driver.clone()))?;
        let mut top: Option<usize> = None;
        for (j, v) in w.iter().enumerate() {
            if *v != 0.0 && top.is_none_or(|t| v.abs() > w[t].abs()) {
                top = Some(j);
            }
        }
        rows.push(RowAgreement {
            row_index: entry.row_index,
            pie_driver: driver.clone(),
            in_selected: w[k] != 0.0,
            surrogate_top: top.map(|t| names[t].clone()),
            matches_top: top == Some(k),
        });
    }
    let active = rows.len();
    let frac = |count: usize| {
        if active == 0 {
            0.0
        } else {
            count as f64 / active as f64
        }
    };
    Ok(Agreement {
        active_rows: active,
        selected_fraction: frac(rows.iter().filter(|r| r.in_selected).count()),
        top_fraction: frac(rows.iter().filter(|r| r.matches_top).count()),
        rows,
    })
}
