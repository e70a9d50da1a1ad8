//! Machine-readable output formats.
//!
//! Score reports, explanations and picks are pretty-printed JSON; plot data
//! is flat CSV. Weights are rounded to 6 significant digits here and nowhere
//! else. No payload carries a wall-clock time, so fixed inputs and seeds give
//! byte-identical files.

use std::io::Write;

use serde::{Deserialize, Serialize};

use pie::{PieReport, StandardizationStats};

/// Rounds to 6 significant digits; zero and non-finite values pass through.
pub fn round6(v: f64) -> f64 {
    if v == 0.0 || !v.is_finite() {
        return v;
    }
    format!("{v:.5e}").parse().unwrap_or(v)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DriverWeight {
    pub feature: String,
    pub weight: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScoreRow {
    pub row_id: String,
    pub degenerate: bool,
    pub top_driver: Option<String>,
    pub drivers: Vec<DriverWeight>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScoreMetadata {
    pub mode: String,
    pub top_k: usize,
    pub n_rows: usize,
    pub n_features: usize,
    pub features: Vec<String>,
    pub degenerate_rows: usize,
    /// Fitted statistics; `null` in raw mode.
    pub stats: Option<StandardizationStats>,
    /// Reserved; never filled by the tool so outputs stay reproducible.
    pub timestamp: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScoreReport {
    pub metadata: ScoreMetadata,
    pub rows: Vec<ScoreRow>,
}

pub fn score_rows(report: &PieReport) -> Vec<ScoreRow> {
    report
        .entries
        .iter()
        .map(|e| ScoreRow {
            row_id: e.row_id.clone(),
            degenerate: e.degenerate,
            top_driver: e.top_driver.clone(),
            drivers: e
                .ranked
                .iter()
                .map(|d| DriverWeight {
                    feature: d.feature.clone(),
                    weight: round6(d.weight),
                })
                .collect(),
        })
        .collect()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExplainParams {
    pub samples: usize,
    pub k_features: usize,
    pub kernel_width: f64,
    pub seed: u64,
    pub black_box: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExplanationRecord {
    pub row_id: String,
    pub selected: Vec<String>,
    pub weights: Vec<f64>,
    pub intercept: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AgreementRecord {
    pub active_rows: usize,
    pub selected_fraction: f64,
    pub top_fraction: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExplainReport {
    pub params: ExplainParams,
    pub features: Vec<String>,
    pub explanations: Vec<ExplanationRecord>,
    /// Dense n×m weights, zero where a feature was not selected.
    pub matrix: Vec<Vec<f64>>,
    /// Agreement with standardized PIE top drivers, when an importance file
    /// backs the black box.
    pub pie_agreement: Option<AgreementRecord>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FeatureScore {
    pub feature: String,
    pub importance: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PickReport {
    pub params: ExplainParams,
    pub budget: usize,
    pub selected_rows: Vec<usize>,
    pub selected_row_ids: Vec<String>,
    pub coverage_score: f64,
    pub feature_importance: Vec<FeatureScore>,
}

/// `feature,weight` lines sorted descending, or a single comment line for a
/// degenerate row.
pub fn write_row_plot<W: Write>(
    mut sink: W,
    drivers: Option<&[DriverWeight]>,
) -> std::io::Result<()> {
    writeln!(sink, "feature,weight")?;
    match drivers {
        Some(ds) => {
            for d in ds {
                writeln!(sink, "{},{}", csv_field(&d.feature), d.weight)?;
            }
        }
        None => writeln!(sink, "# degenerate: no feature has positive influence")?,
    }
    Ok(())
}

/// `feature,importance` lines, one per feature, sorted descending.
pub fn write_importance_plot<W: Write>(
    mut sink: W,
    scores: &[FeatureScore],
) -> std::io::Result<()> {
    writeln!(sink, "feature,importance")?;
    for s in scores {
        writeln!(sink, "{},{}", csv_field(&s.feature), s.importance)?;
    }
    Ok(())
}

fn csv_field(s: &str) -> String {
    if s.contains([',', '"', '\n', '\r']) {
        format!("\"{}\"", s.replace('"', "\"\""))
    } else {
        s.to_string()
    }
}

/// File-name-safe version of a row id.
pub fn file_stem(row_id: &str) -> String {
    row_id
        .chars()
        .map(|c| {
            if c.is_ascii_alphanumeric() || matches!(c, '-' | '_' | '.') {
                c
            } else {
                '_'
            }
        })
        .collect()
}
