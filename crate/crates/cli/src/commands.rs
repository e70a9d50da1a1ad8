use std::fs::{self, File};
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};

use serde::Serialize;

use pie::standardize::fit_column_stats;
use pie::{
    align, compare_with_pie, correlation_importance, explanation_matrix, load_importance,
    load_table, ols_importance, pie_raw, pie_standardized, standardize_importance, submodular_pick,
    write_importance, BlackBox, ExplanationMatrix, FeatureImportance, LabeledTable, LimeParams,
    LinearModel, LookupModel, ObservationTable, PieReport, StandardizationStats,
};

use crate::config::{Method, Mode, RunConfig};
use crate::error::CliError;
use crate::report::{
    file_stem, round6, score_rows, write_importance_plot, write_row_plot, AgreementRecord,
    ExplainParams, ExplainReport, ExplanationRecord, FeatureScore, PickReport, ScoreMetadata,
    ScoreReport, ScoreRow,
};

fn required<'a>(path: &'a Option<PathBuf>, flag: &str) -> Result<&'a Path, CliError> {
    path.as_deref()
        .ok_or_else(|| CliError::Input(format!("missing required flag --{flag}")))
}

fn open(path: &Path) -> Result<File, CliError> {
    File::open(path).map_err(|e| CliError::Input(format!("cannot open {}: {e}", path.display())))
}

fn read_data(cfg: &RunConfig) -> Result<ObservationTable, CliError> {
    let path = required(&cfg.data, "data")?;
    load_table(open(path)?, cfg.row_ids).map_err(|e| CliError::from_pie(path.display(), e))
}

fn read_importance(cfg: &RunConfig) -> Result<FeatureImportance, CliError> {
    let path = required(&cfg.importance, "importance")?;
    load_importance(open(path)?).map_err(|e| CliError::from_pie(path.display(), e))
}

fn create(path: &Path) -> Result<BufWriter<File>, CliError> {
    File::create(path)
        .map(BufWriter::new)
        .map_err(|e| CliError::Internal(format!("cannot create {}: {e}", path.display())))
}

fn write_failed(path: &Path, e: impl std::fmt::Display) -> CliError {
    CliError::Internal(format!("failed writing {}: {e}", path.display()))
}

fn write_json<T: Serialize>(path: &Path, value: &T) -> Result<(), CliError> {
    let mut w = create(path)?;
    serde_json::to_writer_pretty(&mut w, value).map_err(|e| write_failed(path, e))?;
    writeln!(w)
        .and_then(|_| w.flush())
        .map_err(|e| write_failed(path, e))
}

struct Scored {
    table: ObservationTable,
    report: PieReport,
    stats: Option<StandardizationStats>,
    importance: FeatureImportance,
}

fn score_inputs(cfg: &RunConfig) -> Result<Scored, CliError> {
    let table = read_data(cfg)?;
    let importance = read_importance(cfg)?;
    let (report, stats) = match cfg.mode {
        Mode::Standardized => {
            let out = pie_standardized(&importance, &table, cfg.top_k)?;
            (out.report, Some(out.stats))
        }
        Mode::Raw => (pie_raw(&importance, &table, cfg.top_k)?.0, None),
    };
    Ok(Scored {
        table,
        report,
        stats,
        importance,
    })
}

pub fn cmd_score(cfg: &RunConfig) -> Result<(), CliError> {
    let output = required(&cfg.output, "output")?;
    let scored = score_inputs(cfg)?;
    let rows = score_rows(&scored.report);
    let degenerate = rows.iter().filter(|r| r.degenerate).count();
    let report = ScoreReport {
        metadata: ScoreMetadata {
            mode: cfg.mode.as_str().to_string(),
            top_k: cfg.top_k,
            n_rows: scored.table.n_rows(),
            n_features: scored.table.n_cols(),
            features: scored.table.column_names().to_vec(),
            degenerate_rows: degenerate,
            stats: scored.stats.clone(),
            timestamp: None,
        },
        rows,
    };
    write_json(output, &report)?;
    println!(
        "scored {} rows ({} degenerate) in {} mode -> {}",
        report.metadata.n_rows,
        degenerate,
        cfg.mode.as_str(),
        output.display()
    );
    if cfg.emit_plot_data {
        let stem = output
            .file_stem()
            .map_or("report".into(), |s| s.to_string_lossy());
        let dir = output.with_file_name(format!("{stem}_plots"));
        let n = write_plots(&dir, &scored, &report.rows, None)?;
        println!("wrote plot data for {n} rows -> {}", dir.display());
    }
    Ok(())
}

pub fn cmd_plot_data(cfg: &RunConfig) -> Result<(), CliError> {
    let dir = required(&cfg.output, "output")?;
    let scored = score_inputs(cfg)?;
    let rows = score_rows(&scored.report);
    let n = write_plots(dir, &scored, &rows, cfg.rows.as_deref())?;
    println!("wrote plot data for {n} rows -> {}", dir.display());
    Ok(())
}

/// Writes one CSV per selected row plus `normalized_importance.csv`.
fn write_plots(
    dir: &Path,
    scored: &Scored,
    rows: &[ScoreRow],
    wanted: Option<&[String]>,
) -> Result<usize, CliError> {
    let selected: Vec<&ScoreRow> = match wanted {
        None => rows.iter().collect(),
        Some(ids) => ids
            .iter()
            .map(|id| {
                rows.iter()
                    .find(|r| &r.row_id == id)
                    .ok_or_else(|| CliError::Input(format!("unknown row id '{id}'")))
            })
            .collect::<Result<_, _>>()?,
    };
    let aligned = align(&scored.importance, &scored.table)?;
    let std_imp = standardize_importance(&aligned)?;
    let mut global: Vec<FeatureScore> = std_imp
        .column_names
        .iter()
        .zip(&std_imp.values)
        .map(|(f, v)| FeatureScore {
            feature: f.clone(),
            importance: round6(*v),
        })
        .collect();
    // stable: ties keep column order
    global.sort_by(|a, b| b.importance.total_cmp(&a.importance));

    fs::create_dir_all(dir)
        .map_err(|e| CliError::Internal(format!("cannot create {}: {e}", dir.display())))?;
    for row in &selected {
        let path = dir.join(format!("{}.csv", file_stem(&row.row_id)));
        let mut w = create(&path)?;
        let drivers = (!row.degenerate).then_some(row.drivers.as_slice());
        write_row_plot(&mut w, drivers)
            .and_then(|_| w.flush())
            .map_err(|e| write_failed(&path, e))?;
    }
    let path = dir.join("normalized_importance.csv");
    let mut w = create(&path)?;
    write_importance_plot(&mut w, &global)
        .and_then(|_| w.flush())
        .map_err(|e| write_failed(&path, e))?;
    Ok(selected.len())
}

pub fn cmd_importance(cfg: &RunConfig) -> Result<(), CliError> {
    let output = required(&cfg.output, "output")?;
    let target = cfg
        .target
        .as_deref()
        .ok_or_else(|| CliError::Input("missing required flag --target".into()))?;
    let table = read_data(cfg)?;
    let data = LabeledTable::from_table(&table, target)?;
    let imp = match cfg.method {
        Method::Ols => ols_importance(&data)?,
        Method::Corr => correlation_importance(&data)?,
    };
    let mut w = create(output)?;
    write_importance(&imp, &mut w).map_err(|e| write_failed(output, e))?;
    w.flush().map_err(|e| write_failed(output, e))?;
    println!(
        "estimated importance for {} features from {} rows -> {}",
        imp.len(),
        table.n_rows(),
        output.display()
    );
    Ok(())
}

struct Explained {
    table: ObservationTable,
    matrix: ExplanationMatrix,
    params: ExplainParams,
    agreement: Option<AgreementRecord>,
}

fn run_explanations(cfg: &RunConfig) -> Result<Explained, CliError> {
    let data = read_data(cfg)?;
    let lime = LimeParams {
        n_samples: cfg.lime.samples,
        k_features: cfg.lime.k_features,
        kernel_width: cfg.lime.kernel_width,
        seed: cfg.lime.seed,
    };

    let (table, model, black_box, importance): (_, Box<dyn BlackBox>, _, _) = match &cfg.target {
        Some(target) => {
            let (features, scores) = data.split_column(target)?;
            let stats = fit_column_stats(&features)?;
            let model = LookupModel::new(features.clone(), scores, stats)?;
            (features, Box::new(model), format!("lookup:{target}"), None)
        }
        None => {
            let imp = align(&read_importance(cfg)?, &data)?;
            let model = LinearModel {
                weights: imp.beta().to_vec(),
                intercept: 0.0,
            };
            (
                data,
                Box::new(model),
                "linear:importance".to_string(),
                Some(imp),
            )
        }
    };
    let stats = fit_column_stats(&table)?;
    let matrix = explanation_matrix(model.as_ref(), &table, &stats, &lime)?;

    let agreement = match &importance {
        Some(imp) => match pie_standardized(imp, &table, 1) {
            Ok(pie) => {
                let a = compare_with_pie(&pie.report, &matrix.weights, table.column_names())?;
                Some(AgreementRecord {
                    active_rows: a.active_rows,
                    selected_fraction: round6(a.selected_fraction),
                    top_fraction: round6(a.top_fraction),
                })
            }
            Err(e) => {
                println!("note: no PIE agreement computed ({e})");
                None
            }
        },
        None => None,
    };

    let params = ExplainParams {
        samples: lime.n_samples,
        k_features: lime.k_features,
        kernel_width: lime.resolved_width(table.n_cols()),
        seed: lime.seed,
        black_box,
    };
    Ok(Explained {
        table,
        matrix,
        params,
        agreement,
    })
}

pub fn cmd_explain(cfg: &RunConfig) -> Result<(), CliError> {
    let output = required(&cfg.output, "output")?;
    let ex = run_explanations(cfg)?;
    let explanations = ex
        .matrix
        .explanations
        .iter()
        .map(|e| ExplanationRecord {
            row_id: ex.table.row_label(e.instance),
            selected: e.selected.clone(),
            weights: e.weights.iter().copied().map(round6).collect(),
            intercept: round6(e.intercept),
        })
        .collect();
    let report = ExplainReport {
        params: ex.params,
        features: ex.table.column_names().to_vec(),
        explanations,
        matrix: ex
            .matrix
            .weights
            .iter()
            .map(|r| r.iter().copied().map(round6).collect())
            .collect(),
        pie_agreement: ex.agreement,
    };
    write_json(output, &report)?;
    println!(
        "explained {} rows with {} samples each -> {}",
        report.explanations.len(),
        report.params.samples,
        output.display()
    );
    if let Some(a) = &report.pie_agreement {
        println!(
            "agreement with PIE top driver: selected {:.3}, top {:.3} over {} active rows",
            a.selected_fraction, a.top_fraction, a.active_rows
        );
    }
    Ok(())
}

pub fn cmd_pick(cfg: &RunConfig) -> Result<(), CliError> {
    let output = required(&cfg.output, "output")?;
    let ex = run_explanations(cfg)?;
    let pick = submodular_pick(&ex.matrix.weights, cfg.budget);
    let report = PickReport {
        params: ex.params,
        budget: cfg.budget,
        selected_row_ids: pick
            .selected_rows
            .iter()
            .map(|&i| ex.table.row_label(i))
            .collect(),
        selected_rows: pick.selected_rows,
        coverage_score: round6(pick.coverage_score),
        feature_importance: ex
            .table
            .column_names()
            .iter()
            .zip(&pick.feature_importance)
            .map(|(f, v)| FeatureScore {
                feature: f.clone(),
                importance: round6(*v),
            })
            .collect(),
    };
    write_json(output, &report)?;
    println!(
        "picked {} of {} rows (budget {}), coverage {} -> {}",
        report.selected_rows.len(),
        ex.table.n_rows(),
        cfg.budget,
        report.coverage_score,
        output.display()
    );
    Ok(())
}
