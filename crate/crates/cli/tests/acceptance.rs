//! Acceptance suite. Runs every criterion, prints one PASS/FAIL line each and
//! exits nonzero if any fails.
//!
//!     cargo test -p pie-cli --test acceptance

use std::fs;
use std::panic::{self, AssertUnwindSafe};
use std::path::Path;
use std::process::Command;
use std::time::{Duration, Instant};

use pie::pick::{coverage, feature_importance};
use pie::standardize::fit_column_stats;
use pie::{
    explain_instance, ols_importance, pie_standardized, submodular_pick, FeatureImportance,
    LabeledTable, LimeParams, LinearModel, ObservationTable,
};
use pie_oracle::{self as oracle, Matrix};
use rand::Rng;

const CELL_TOL: f64 = 1e-12;
const ROW_SUM_TOL: f64 = 1e-9;
const AFFINE_TOL: f64 = 1e-9;
const OLS_REL_TOL: f64 = 0.05;
const OLS_IRRELEVANT_MAX: f64 = 0.02;
const LIME_MIN_HITS: usize = 95;
const PICK_MIN_OPTIMAL: f64 = 0.90;

type Outcome = Result<String, String>;
type Criterion = (&'static str, &'static str, fn() -> Outcome);

fn check(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn within(elapsed: Duration, limit_s: f64) -> Result<(), String> {
    check(elapsed.as_secs_f64() < limit_s, || {
        format!("took {:.2}s, limit {limit_s}s", elapsed.as_secs_f64())
    })
}

fn names(m: usize) -> Vec<String> {
    (0..m).map(|k| format!("f{k}")).collect()
}

struct Dataset {
    beta: Vec<f64>,
    x: Matrix,
}

impl Dataset {
    fn random(seed: u64) -> Self {
        let mut rng = oracle::rng(seed);
        let n = rng.random_range(2..=50);
        let m = rng.random_range(2..=10);
        let beta = oracle::uniform_vec(&mut rng, m, -1.0, 1.0);
        let x = oracle::uniform_matrix(&mut rng, n, m, -5.0, 5.0);
        Dataset { beta, x }
    }

    fn importance(&self) -> FeatureImportance {
        FeatureImportance::new(names(self.beta.len()), self.beta.clone()).unwrap()
    }

    fn table(&self) -> ObservationTable {
        ObservationTable::new(names(self.beta.len()), self.x.clone(), None).unwrap()
    }
}

fn corpus() -> Vec<Dataset> {
    (0..100).map(|s| Dataset::random(1000 + s)).collect()
}

fn top_index(entry_driver: &Option<String>) -> Option<usize> {
    entry_driver
        .as_ref()
        .map(|f| f[1..].parse::<usize>().unwrap())
}

fn ac1_oracle_equivalence() -> Outcome {
    let start = Instant::now();
    let mut cells = 0usize;
    let mut worst = 0.0f64;
    for (d, data) in corpus().iter().enumerate() {
        let lit = oracle::standardized_pipeline(&data.beta, &data.x).unwrap();
        let out =
            pie_standardized(&data.importance(), &data.table(), 1).map_err(|e| e.to_string())?;
        for i in 0..data.x.len() {
            check(out.influence.is_active(i) == lit.active[i], || {
                format!("dataset {d} row {i}: activity differs")
            })?;
            for k in 0..data.beta.len() {
                let diff = (out.influence.weight(i, k) - lit.weights[i][k]).abs();
                worst = worst.max(diff);
                check(diff <= CELL_TOL, || {
                    format!("dataset {d} cell ({i},{k}) off by {diff:e}")
                })?;
                cells += 1;
            }
            let got = top_index(&out.report.entries[i].top_driver);
            check(got == lit.argmax_w[i], || {
                format!(
                    "dataset {d} row {i}: driver {got:?} vs {:?}",
                    lit.argmax_w[i]
                )
            })?;
        }
    }
    within(start.elapsed(), 10.0)?;
    Ok(format!(
        "100 datasets, {cells} cells, max |diff| {worst:.1e}, {:.2}s",
        start.elapsed().as_secs_f64()
    ))
}

fn ac2_row_stochastic() -> Outcome {
    let start = Instant::now();
    let mut active = 0usize;
    for s in 0..1000 {
        let data = Dataset::random(50_000 + s);
        let out =
            pie_standardized(&data.importance(), &data.table(), 1).map_err(|e| e.to_string())?;
        let w = &out.influence;
        for i in 0..w.n_rows() {
            let row = w.row(i);
            check(row.iter().all(|v| (0.0..=1.0).contains(v)), || {
                format!("instance {s} row {i}: weight outside [0,1]")
            })?;
            if w.is_active(i) {
                active += 1;
                let sum: f64 = row.iter().sum();
                check((sum - 1.0).abs() <= ROW_SUM_TOL, || {
                    format!("instance {s} row {i}: sum {sum}")
                })?;
            }
        }
    }
    within(start.elapsed(), 10.0)?;
    Ok(format!(
        "1000 instances, {active} active rows, {:.2}s",
        start.elapsed().as_secs_f64()
    ))
}

fn ac3_argmax_forms() -> Outcome {
    let mut rows = 0usize;
    for (d, data) in corpus().iter().enumerate() {
        let lit = oracle::standardized_pipeline(&data.beta, &data.x).unwrap();
        let out =
            pie_standardized(&data.importance(), &data.table(), 1).map_err(|e| e.to_string())?;
        for i in 0..data.x.len() {
            if !lit.active[i] {
                continue;
            }
            rows += 1;
            let got = top_index(&out.report.entries[i].top_driver);
            check(
                lit.argmax_w[i] == lit.argmax_w_over_s[i] && got == lit.argmax_w[i],
                || format!("dataset {d} row {i}"),
            )?;
        }
    }
    Ok(format!("{rows} active rows agree"))
}

fn ac4_affine_invariance() -> Outcome {
    let mut worst = 0.0f64;
    for (d, data) in corpus().iter().enumerate() {
        let mut rng = oracle::rng(7000 + d as u64);
        let m = data.beta.len();
        let a: Vec<f64> = (0..m).map(|_| 10.0 - rng.random_range(0.0..10.0)).collect();
        let b = oracle::uniform_vec(&mut rng, m, -100.0, 100.0);
        let moved = Dataset {
            beta: data.beta.clone(),
            x: data
                .x
                .iter()
                .map(|r| (0..m).map(|k| a[k] * r[k] + b[k]).collect())
                .collect(),
        };
        let before =
            pie_standardized(&data.importance(), &data.table(), m).map_err(|e| e.to_string())?;
        let after =
            pie_standardized(&moved.importance(), &moved.table(), m).map_err(|e| e.to_string())?;
        for (i, (p, q)) in before
            .report
            .entries
            .iter()
            .zip(&after.report.entries)
            .enumerate()
        {
            check(p.top_driver == q.top_driver, || {
                format!("dataset {d} row {i}: driver changed")
            })?;
            for k in 0..m {
                let diff = (before.influence.weight(i, k) - after.influence.weight(i, k)).abs();
                worst = worst.max(diff);
                check(diff <= AFFINE_TOL, || {
                    format!("dataset {d} cell ({i},{k}) off by {diff:e}")
                })?;
            }
        }
    }
    Ok(format!("100 datasets, max |diff| {worst:.1e}"))
}

fn ac5_degenerate() -> Outcome {
    let mut flagged = 0usize;
    for s in 0..50u64 {
        let mut data = Dataset::random(90_000 + s);
        let n = data.x.len();
        let m = data.beta.len();
        let mins: Vec<f64> = (0..m)
            .map(|k| data.x.iter().map(|r| r[k]).fold(f64::INFINITY, f64::min))
            .collect();
        // at the column minimum every clipped z-score is zero
        let planted: Vec<usize> = (0..n).filter(|i| i % 3 == 0).collect();
        for &i in &planted {
            data.x[i] = mins.clone();
        }
        let lit = oracle::standardized_pipeline(&data.beta, &data.x).unwrap();
        let expected: Vec<usize> = (0..n).filter(|&i| !lit.active[i]).collect();
        let out =
            pie_standardized(&data.importance(), &data.table(), 2).map_err(|e| e.to_string())?;
        let got = out.report.degenerate_rows();
        check(got == expected, || {
            format!("dataset {s}: flagged {got:?}, expected {expected:?}")
        })?;
        check(planted.iter().all(|i| got.contains(i)), || {
            format!("dataset {s}: planted row missed")
        })?;
        for &i in &got {
            let e = &out.report.entries[i];
            check(e.top_driver.is_none() && e.ranked.is_empty(), || {
                format!("dataset {s} row {i}: degenerate row has drivers")
            })?;
        }
        flagged += got.len();
    }
    let dir = tempfile::tempdir().map_err(|e| e.to_string())?;
    let code = run_pie(&[
        "score",
        "--data",
        &fixture("customers.csv"),
        "--row-ids",
        "--importance",
        &fixture("importance_constant.csv"),
        "--output",
        &path_str(&dir.path().join("r.json")),
    ]);
    check(code == 3, || {
        format!("constant importance exited {code}, expected 3")
    })?;
    Ok(format!(
        "50 datasets, {flagged} degenerate rows flagged exactly; constant importance -> 3"
    ))
}

fn ac6_ols_recovery() -> Outcome {
    let n = 500;
    let mut rng = oracle::rng(2024);
    let x1 = oracle::gaussian_vec(&mut rng, n, 1.0, 2.0);
    let x2 = oracle::gaussian_vec(&mut rng, n, -3.0, 0.5);
    let x3 = oracle::gaussian_vec(&mut rng, n, 0.0, 1.0);
    let eps = oracle::gaussian_vec(&mut rng, n, 0.0, 0.01);
    let y: Vec<f64> = (0..n).map(|i| 2.0 * x1[i] - 3.0 * x2[i] + eps[i]).collect();
    let rows: Matrix = (0..n).map(|i| vec![x1[i], x2[i], x3[i]]).collect();
    let table = ObservationTable::new(names(3), rows, None).unwrap();
    let data = LabeledTable::new(table, y).map_err(|e| e.to_string())?;
    let beta = ols_importance(&data).map_err(|e| e.to_string())?;
    let beta = beta.beta();
    let truth = [
        2.0 * oracle::sample_std(&x1),
        -3.0 * oracle::sample_std(&x2),
    ];
    let rel: Vec<f64> = (0..2)
        .map(|k| ((beta[k] - truth[k]) / truth[k]).abs())
        .collect();
    check(rel.iter().all(|r| *r <= OLS_REL_TOL), || {
        format!("relative errors {rel:?} for {:?} vs {truth:?}", &beta[..2])
    })?;
    check(beta[2].abs() < OLS_IRRELEVANT_MAX, || {
        format!("irrelevant coefficient {}", beta[2])
    })?;
    Ok(format!(
        "rel err {:.1e}, {:.1e}; |b3| = {:.1e}",
        rel[0],
        rel[1],
        beta[2].abs()
    ))
}

fn ac7_lime_recovery() -> Outcome {
    let start = Instant::now();
    let x = oracle::uniform_matrix(&mut oracle::rng(77), 40, 3, -2.0, 2.0);
    let table = ObservationTable::new(names(3), x, None).unwrap();
    let stats = fit_column_stats(&table).map_err(|e| e.to_string())?;
    let model = LinearModel {
        weights: vec![3.0, 0.0, 0.0],
        intercept: 0.0,
    };
    let mut hits = 0;
    for seed in 0..100u64 {
        let params = LimeParams {
            n_samples: 500,
            k_features: 1,
            kernel_width: None,
            seed,
        };
        let row = (seed % 40) as usize;
        let e = explain_instance(&model, table.row(row), &stats, &params, row)
            .map_err(|e| e.to_string())?;
        if e.selected_indices == [0] && e.weights[0] > 0.0 {
            hits += 1;
        }
    }
    check(hits >= LIME_MIN_HITS, || {
        format!("{hits}/100 runs recovered feature 1")
    })?;
    within(start.elapsed(), 30.0)?;
    Ok(format!(
        "{hits}/100 runs, {:.2}s",
        start.elapsed().as_secs_f64()
    ))
}

fn ac8_pick_optimality() -> Outcome {
    let bound = 1.0 - (-1.0f64).exp();
    let mut optimal = 0usize;
    let mut worst_ratio = 1.0f64;
    for s in 0..50u64 {
        let mut rng = oracle::rng(31_000 + s);
        let n = rng.random_range(2..=10);
        let m = rng.random_range(2..=8);
        let budget = rng.random_range(1..=3);
        let w: Matrix = (0..n)
            .map(|_| {
                (0..m)
                    .map(|_| {
                        if rng.random_bool(0.4) {
                            rng.random_range(-1.0..1.0)
                        } else {
                            0.0
                        }
                    })
                    .collect()
            })
            .collect();
        let greedy = submodular_pick(&w, budget);
        let best = oracle::exhaustive_best_coverage(&w, budget);
        let greedy_cov = coverage(&w, &feature_importance(&w), &greedy.selected_rows);
        if best == 0.0 {
            optimal += 1;
            continue;
        }
        let ratio = greedy_cov / best;
        worst_ratio = worst_ratio.min(ratio);
        if (greedy_cov - best).abs() <= 1e-12 * best {
            optimal += 1;
        }
        check(ratio >= bound, || {
            format!("matrix {s}: ratio {ratio:.4} below 1-1/e")
        })?;
    }
    let frac = optimal as f64 / 50.0;
    check(frac >= PICK_MIN_OPTIMAL, || {
        format!("only {optimal}/50 optimal")
    })?;
    Ok(format!(
        "{optimal}/50 optimal, worst ratio {worst_ratio:.4}"
    ))
}

fn ac9_determinism() -> Outcome {
    let dir = tempfile::tempdir().map_err(|e| e.to_string())?;
    let data = fixture("customers.csv");
    let imp = fixture("importance.csv");
    for sub in ["score", "explain", "pick"] {
        let mut outputs = Vec::new();
        for run in 0..2 {
            let out = dir.path().join(format!("{sub}{run}.json"));
            let code = run_pie(&[
                sub,
                "--data",
                &data,
                "--row-ids",
                "--importance",
                &imp,
                "--seed",
                "42",
                "--output",
                &path_str(&out),
            ]);
            check(code == 0, || format!("{sub} exited {code}"))?;
            outputs.push(fs::read(&out).map_err(|e| e.to_string())?);
        }
        check(outputs[0] == outputs[1], || format!("{sub} outputs differ"))?;
    }
    Ok("score, explain, pick byte-identical".into())
}

fn ac10_exit_codes() -> Outcome {
    let dir = tempfile::tempdir().map_err(|e| e.to_string())?;
    let out = path_str(&dir.path().join("out.json"));
    let customers = fixture("customers.csv");
    let imp = fixture("importance.csv");
    let labeled = fixture("labeled.csv");
    let base = |extra: &[&str]| -> Vec<String> {
        let mut v: Vec<String> = ["--data", &customers, "--row-ids", "--importance", &imp]
            .map(String::from)
            .to_vec();
        v.extend(extra.iter().map(|s| s.to_string()));
        v
    };
    let with_sub = |sub: &str, args: Vec<String>| -> Vec<String> {
        let mut v = vec![sub.to_string()];
        v.extend(args);
        v
    };
    let unwritable = path_str(&dir.path().join("missing_dir").join("out.json"));
    let cases: Vec<(&str, Vec<String>, i32)> = vec![
        ("score ok", with_sub("score", base(&["--output", &out])), 0),
        (
            "explain ok",
            with_sub("explain", base(&["--output", &out])),
            0,
        ),
        ("pick ok", with_sub("pick", base(&["--output", &out])), 0),
        (
            "unwritable output",
            with_sub("score", base(&["--output", &unwritable])),
            1,
        ),
        (
            "missing data file",
            vec![
                "score",
                "--data",
                "nope.csv",
                "--importance",
                &imp,
                "--output",
                &out,
            ]
            .into_iter()
            .map(String::from)
            .collect(),
            2,
        ),
        (
            "bad mode",
            with_sub("score", base(&["--mode", "sideways", "--output", &out])),
            2,
        ),
        (
            "top-k zero",
            with_sub("score", base(&["--top-k", "0", "--output", &out])),
            2,
        ),
        (
            "unknown target",
            [
                "importance",
                "--data",
                &labeled,
                "--target",
                "zz",
                "--output",
                &out,
            ]
            .map(String::from)
            .to_vec(),
            2,
        ),
        (
            "feature mismatch",
            [
                "score",
                "--data",
                &labeled,
                "--importance",
                &imp,
                "--output",
                &out,
            ]
            .map(String::from)
            .to_vec(),
            2,
        ),
        (
            "too few samples",
            with_sub("explain", base(&["--samples", "1", "--output", &out])),
            2,
        ),
        (
            "constant importance",
            [
                "score",
                "--data",
                &customers,
                "--row-ids",
                "--importance",
                &fixture("importance_constant.csv"),
                "--output",
                &out,
            ]
            .map(String::from)
            .to_vec(),
            3,
        ),
        (
            "collinear regressors",
            [
                "importance",
                "--data",
                &fixture("collinear.csv"),
                "--target",
                "y",
                "--output",
                &out,
            ]
            .map(String::from)
            .to_vec(),
            3,
        ),
        (
            "vanishing kernel",
            with_sub(
                "explain",
                base(&["--kernel-width", "1e-9", "--output", &out]),
            ),
            3,
        ),
    ];
    let total = cases.len();
    for (label, args, want) in cases {
        let args: Vec<&str> = args.iter().map(String::as_str).collect();
        let got = run_pie(&args);
        check(got == want, || {
            format!("{label}: exit {got}, expected {want}")
        })?;
    }
    Ok(format!("{total} fixture runs cover exit codes 0/1/2/3"))
}

fn fixture(name: &str) -> String {
    path_str(
        &Path::new(env!("CARGO_MANIFEST_DIR"))
            .join("tests/fixtures")
            .join(name),
    )
}

fn path_str(p: &Path) -> String {
    p.to_str().unwrap().to_string()
}

fn run_pie(args: &[&str]) -> i32 {
    Command::new(env!("CARGO_BIN_EXE_pie"))
        .args(args)
        .output()
        .expect("binary runs")
        .status
        .code()
        .unwrap_or(-1)
}

fn main() {
    let criteria: [Criterion; 10] = [
        ("AC1", "oracle equivalence", ac1_oracle_equivalence),
        ("AC2", "row stochasticity", ac2_row_stochastic),
        ("AC3", "argmax form equivalence", ac3_argmax_forms),
        ("AC4", "affine invariance", ac4_affine_invariance),
        ("AC5", "degenerate handling", ac5_degenerate),
        ("AC6", "OLS recovery", ac6_ols_recovery),
        ("AC7", "local surrogate linear recovery", ac7_lime_recovery),
        ("AC8", "submodular pick optimality", ac8_pick_optimality),
        ("AC9", "determinism", ac9_determinism),
        ("AC10", "CLI exit-code contract", ac10_exit_codes),
    ];
    panic::set_hook(Box::new(|_| {}));
    let mut failed = 0;
    for (id, title, run) in criteria {
        let outcome = panic::catch_unwind(AssertUnwindSafe(run)).unwrap_or_else(|p| {
            let msg = p
                .downcast_ref::<String>()
                .cloned()
                .or_else(|| p.downcast_ref::<&str>().map(|s| s.to_string()))
                .unwrap_or_else(|| "panic".into());
            Err(format!("panicked: {msg}"))
        });
        match outcome {
            Ok(detail) => println!("[PASS] {id} {title}: {detail}"),
            Err(why) => {
                failed += 1;
                println!("[FAIL] {id} {title}: {why}");
            }
        }
    }
    println!("{} passed, {failed} failed", 10 - failed);
    if failed > 0 {
        std::process::exit(1);
    }
}
