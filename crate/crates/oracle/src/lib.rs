//! Literal, unoptimized reference computations for tests.
//!
//! Nothing here depends on the library under test. Every function works on
//! plain nested vectors and recomputes from scratch, favouring a direct
//! transcription of each formula over speed.

// index loops mirror the formulas
#![allow(clippy::needless_range_loop)]

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub type Matrix = Vec<Vec<f64>>;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn uniform_matrix(rng: &mut ChaCha8Rng, n: usize, m: usize, lo: f64, hi: f64) -> Matrix {
    (0..n)
        .map(|_| (0..m).map(|_| rng.random_range(lo..hi)).collect())
        .collect()
}

pub fn uniform_vec(rng: &mut ChaCha8Rng, m: usize, lo: f64, hi: f64) -> Vec<f64> {
    (0..m).map(|_| rng.random_range(lo..hi)).collect()
}

/// Normal draws with the given mean and sd by the Box–Muller transform.
pub fn gaussian_vec(rng: &mut ChaCha8Rng, n: usize, mean: f64, sd: f64) -> Vec<f64> {
    (0..n)
        .map(|_| {
            let u1: f64 = 1.0 - rng.random::<f64>();
            let u2: f64 = rng.random();
            mean + sd * (-2.0 * u1.ln()).sqrt() * (2.0 * std::f64::consts::PI * u2).cos()
        })
        .collect()
}

pub fn column(x: &Matrix, k: usize) -> Vec<f64> {
    x.iter().map(|r| r[k]).collect()
}

pub fn mean(xs: &[f64]) -> f64 {
    let mut s = 0.0;
    for x in xs {
        s += x;
    }
    s / xs.len() as f64
}

/// Two-pass sample standard deviation (divisor len − 1).
pub fn sample_std(xs: &[f64]) -> f64 {
    let mu = mean(xs);
    let mut ss = 0.0;
    for x in xs {
        ss += (x - mu) * (x - mu);
    }
    (ss / (xs.len() as f64 - 1.0)).sqrt()
}

fn all_equal(xs: &[f64]) -> bool {
    xs.iter().all(|&x| x == xs[0])
}

/// `max(0, (v − mean)/std)`; `None` when every entry is equal.
pub fn zscore_clip(v: &[f64]) -> Option<Vec<f64>> {
    if all_equal(v) {
        return None;
    }
    let mu = mean(v);
    let sd = sample_std(v);
    Some(
        v.iter()
            .map(|x| {
                let z = (x - mu) / sd;
                if z < 0.0 {
                    0.0
                } else {
                    z
                }
            })
            .collect(),
    )
}

/// Column-wise [`zscore_clip`]; constant columns become zero.
pub fn standardize_columns(x: &Matrix) -> Matrix {
    let n = x.len();
    let m = x[0].len();
    let mut out = vec![vec![0.0; m]; n];
    for k in 0..m {
        if let Some(col) = zscore_clip(&column(x, k)) {
            for i in 0..n {
                out[i][k] = col[i];
            }
        }
    }
    out
}

/// Literal evaluation of the per-row normalized products.
#[derive(Debug, Clone)]
pub struct LiteralPie {
    pub weights: Matrix,
    pub row_sums: Vec<f64>,
    pub active: Vec<bool>,
    /// `argmax_k W_ik`, smallest index on ties; `None` for inactive rows.
    pub argmax_w: Vec<Option<usize>>,
    /// `argmax_k W_ik / S_i`, smallest index on ties.
    pub argmax_w_over_s: Vec<Option<usize>>,
}

fn first_argmax(v: &[f64]) -> usize {
    let mut best = 0;
    for k in 0..v.len() {
        if v[k] > v[best] {
            best = k;
        }
    }
    best
}

/// `W_ik = β_k x_ik / Σ_j β_j x_ij` where every product is first clipped at
/// zero. With clipped standardized inputs the clip is a no-op.
pub fn literal_pie(beta: &[f64], x: &Matrix) -> LiteralPie {
    let n = x.len();
    let m = beta.len();
    let mut weights = vec![vec![0.0; m]; n];
    let mut row_sums = vec![0.0; n];
    let mut active = vec![false; n];
    let mut argmax_w = vec![None; n];
    let mut argmax_w_over_s = vec![None; n];
    for i in 0..n {
        let product = |k: usize| {
            let p = beta[k] * x[i][k];
            if p > 0.0 {
                p
            } else {
                0.0
            }
        };
        let mut s = 0.0;
        for k in 0..m {
            s += product(k);
        }
        row_sums[i] = if s > 0.0 { s } else { 0.0 };
        if s > 0.0 {
            active[i] = true;
            for k in 0..m {
                weights[i][k] = product(k) / s;
            }
            argmax_w[i] = Some(first_argmax(&weights[i]));
            let scaled: Vec<f64> = weights[i].iter().map(|w| w / s).collect();
            argmax_w_over_s[i] = Some(first_argmax(&scaled));
        }
    }
    LiteralPie {
        weights,
        row_sums,
        active,
        argmax_w,
        argmax_w_over_s,
    }
}

/// Standardize-and-clip both inputs, then [`literal_pie`]. `None` when the
/// importance vector is constant.
pub fn standardized_pipeline(beta: &[f64], x: &Matrix) -> Option<LiteralPie> {
    let b = zscore_clip(beta)?;
    Some(literal_pie(&b, &standardize_columns(x)))
}

/// Indices of strictly positive entries, heaviest first, ties by index,
/// obtained by exhaustive pairwise ranking.
pub fn ranked_positive(row: &[f64], k: usize) -> Vec<usize> {
    let pos: Vec<usize> = (0..row.len()).filter(|&j| row[j] > 0.0).collect();
    let mut rank: Vec<(usize, usize)> = pos
        .iter()
        .map(|&j| {
            let ahead = pos
                .iter()
                .filter(|&&o| row[o] > row[j] || (row[o] == row[j] && o < j))
                .count();
            (ahead, j)
        })
        .collect();
    rank.sort();
    rank.into_iter().take(k).map(|(_, j)| j).collect()
}

/// Solves `A x = b` by Gaussian elimination with partial pivoting.
pub fn gauss_solve(mut a: Matrix, mut b: Vec<f64>) -> Vec<f64> {
    let p = b.len();
    for col in 0..p {
        let piv = (col..p)
            .max_by(|&i, &j| a[i][col].abs().total_cmp(&a[j][col].abs()))
            .unwrap();
        a.swap(col, piv);
        b.swap(col, piv);
        for r in col + 1..p {
            let f = a[r][col] / a[col][col];
            for c in col..p {
                a[r][c] -= f * a[col][c];
            }
            b[r] -= f * b[col];
        }
    }
    let mut x = vec![0.0; p];
    for r in (0..p).rev() {
        let mut s = b[r];
        for c in r + 1..p {
            s -= a[r][c] * x[c];
        }
        x[r] = s / a[r][r];
    }
    x
}

/// Least squares of `y` on z-scored columns of `x` plus intercept, via the
/// normal equations. Returns slopes only.
pub fn standardized_ols(x: &Matrix, y: &[f64]) -> Vec<f64> {
    let n = x.len();
    let m = x[0].len();
    let stats: Vec<(f64, f64)> = (0..m)
        .map(|k| {
            let c = column(x, k);
            (mean(&c), sample_std(&c))
        })
        .collect();
    let design: Matrix = x
        .iter()
        .map(|r| {
            let mut d = vec![1.0];
            d.extend((0..m).map(|k| (r[k] - stats[k].0) / stats[k].1));
            d
        })
        .collect();
    let p = m + 1;
    let mut a = vec![vec![0.0; p]; p];
    let mut b = vec![0.0; p];
    for i in 0..n {
        for r in 0..p {
            b[r] += design[i][r] * y[i];
            for c in 0..p {
                a[r][c] += design[i][r] * design[i][c];
            }
        }
    }
    gauss_solve(a, b)[1..].to_vec()
}

/// `|corr(x, y)|` with explicit two-pass centering.
pub fn abs_pearson(x: &[f64], y: &[f64]) -> f64 {
    let mx = mean(x);
    let my = mean(y);
    let mut sxy = 0.0;
    let mut sxx = 0.0;
    let mut syy = 0.0;
    for i in 0..x.len() {
        sxy += (x[i] - mx) * (y[i] - my);
        sxx += (x[i] - mx) * (x[i] - mx);
        syy += (y[i] - my) * (y[i] - my);
    }
    (sxy / (sxx.sqrt() * syy.sqrt())).abs()
}

/// `I_j = sqrt(Σ_i |W_ij|)`.
pub fn pick_importance(w: &Matrix) -> Vec<f64> {
    let m = w[0].len();
    (0..m)
        .map(|j| w.iter().map(|r| r[j].abs()).sum::<f64>().sqrt())
        .collect()
}

pub fn set_coverage(w: &Matrix, importance: &[f64], rows: &[usize]) -> f64 {
    let mut c = 0.0;
    for j in 0..importance.len() {
        if rows.iter().any(|&i| w[i][j] != 0.0) {
            c += importance[j];
        }
    }
    c
}

/// Best coverage over all subsets of at most `budget` rows.
pub fn exhaustive_best_coverage(w: &Matrix, budget: usize) -> f64 {
    let n = w.len();
    let imp = pick_importance(w);
    let mut best = 0.0f64;
    for mask in 0u32..(1u32 << n) {
        if mask.count_ones() as usize > budget {
            continue;
        }
        let rows: Vec<usize> = (0..n).filter(|i| mask & (1 << i) != 0).collect();
        best = best.max(set_coverage(w, &imp, &rows));
    }
    best
}
