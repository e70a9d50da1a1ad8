//! Greedy budgeted selection of instances whose explanations cover the most
//! globally important features.
//!
//! Feature importance is `I_j = sqrt(Σ_i |W_ij|)` and the coverage of a set
//! `V` is `c(V) = Σ_j I_j · [∃ i ∈ V : W_ij ≠ 0]`. Coverage is monotone
//! submodular, so greedy selection is within `1 − 1/e` of the optimum.

use serde::Serialize;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PickResult {
    pub selected_rows: Vec<usize>,
    pub coverage_score: f64,
    pub feature_importance: Vec<f64>,
}

pub fn feature_importance(expl: &[Vec<f64>]) -> Vec<f64> {
    let m = expl.first().map_or(0, Vec::len);
    (0..m)
        .map(|j| expl.iter().map(|row| row[j].abs()).sum::<f64>().sqrt())
        .collect()
}

/// Coverage of an arbitrary row set under importances `importance`.
pub fn coverage(expl: &[Vec<f64>], importance: &[f64], rows: &[usize]) -> f64 {
    importance
        .iter()
        .enumerate()
        .filter(|&(j, _)| rows.iter().any(|&i| expl[i][j] != 0.0))
        .fold(0.0, |acc, (_, w)| acc + w)
}

/// Greedily adds the row with the largest marginal coverage gain until the
/// budget is spent or no row adds coverage. Ties go to the smallest row index.
pub fn submodular_pick(expl: &[Vec<f64>], budget: usize) -> PickResult {
    let importance = feature_importance(expl);
    let m = importance.len();
    let mut covered = vec![false; m];
    let mut selected = Vec::new();
    while selected.len() < budget {
        let mut best: Option<(f64, usize)> = None;
        for (i, row) in expl.iter().enumerate() {
            if selected.contains(&i) {
                continue;
            }
            let gain: f64 = (0..m)
                .filter(|&j| !covered[j] && row[j] != 0.0)
                .map(|j| importance[j])
                .sum();
            if best.is_none_or(|(g, _)| gain > g) {
                best = Some((gain, i));
            }
        }
        match best {
            Some((gain, i)) if gain > 0.0 => {
                for j in 0..m {
                    covered[j] |= expl[i][j] != 0.0;
                }
                selected.push(i);
            }
            _ => break,
        }
    }
    let coverage_score = coverage(expl, &importance, &selected);
    PickResult {
        selected_rows: selected,
        coverage_score,
        feature_importance: importance,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn empty_budget() {
        let w = vec![vec![1.0, 0.0], vec![0.0, 2.0]];
        let r = submodular_pick(&w, 0);
        assert!(r.selected_rows.is_empty());
        assert_eq!(r.coverage_score.to_bits(), 0.0f64.to_bits());
    }

    #[test]
    fn dominant_row_first() {
        let w = vec![
            vec![0.5, 0.0, 0.0],
            vec![0.1, 0.2, 0.3],
            vec![0.0, 0.0, 0.9],
        ];
        let r = submodular_pick(&w, 1);
        assert_eq!(r.selected_rows, vec![1]);
    }

    #[test]
    fn stops_when_nothing_left_to_cover() {
        let w = vec![vec![1.0, 1.0], vec![1.0, 0.0], vec![0.0, 0.0]];
        let r = submodular_pick(&w, 3);
        assert_eq!(r.selected_rows, vec![0]);
        assert_eq!(r.coverage_score, r.feature_importance.iter().sum::<f64>());
    }

    #[test]
    fn importance_zero_only_for_unused_columns() {
        let w = vec![vec![-4.0, 0.0], vec![0.0, 0.0]];
        let imp = feature_importance(&w);
        assert_eq!(imp, vec![2.0, 0.0]);
    }
}
