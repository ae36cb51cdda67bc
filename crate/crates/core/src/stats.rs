//! Nonparametric tests for comparing optimizer outcomes.

use statrs::distribution::{ContinuousCDF, Normal};
use thiserror::Error;

#[derive(Debug, Error, PartialEq)]
pub enum StatsError {
    #[error("paired samples differ in length: {0} vs {1}")]
    UnequalLengths(usize, usize),
    #[error("need at least {need} observations, got {got}")]
    TooFewSamples { need: usize, got: usize },
    #[error("all paired differences are zero; the test is undefined")]
    AllDifferencesZero,
    #[error("need at least two algorithms, got {0}")]
    TooFewAlgorithms(usize),
    #[error("cost matrix rows differ in length")]
    RaggedMatrix,
}

/// Ranks with average ranks assigned to ties (1-based).
fn average_ranks(values: &[f64]) -> Vec<f64> {
    let mut order: Vec<usize> = (0..values.len()).collect();
    order.sort_by(|&a, &b| values[a].total_cmp(&values[b]));
    let mut ranks = vec![0.0; values.len()];
    let mut i = 0;
    while i < order.len() {
        let mut j = i;
        while j + 1 < order.len() && values[order[j + 1]] == values[order[i]] {
            j += 1;
        }
        let avg = (i + j + 2) as f64 / 2.0; // mean of ranks i+1 ..= j+1
        for &idx in &order[i..=j] {
            ranks[idx] = avg;
        }
        i = j + 1;
    }
    ranks
}

/// Result of the signed-rank test.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct WilcoxonResult {
    /// `min(W+, W-)`.
    pub statistic: f64,
    /// Two-sided p-value.
    pub p_value: f64,
    /// Number of nonzero differences actually ranked.
    pub n_used: usize,
    /// Whether the exact null distribution was enumerated.
    pub exact: bool,
}

/// Largest `n` for which the exact sign-pattern distribution is enumerated;
/// beyond it the normal approximation with continuity and tie correction is
/// used.
pub const WILCOXON_EXACT_LIMIT: usize = 25;

/// Two-sided Wilcoxon signed-rank test on paired samples.
///
/// Zero differences are dropped; ties in `|difference|` receive average
/// ranks. For `n <= 25` the p-value is exact over all `2^n` sign patterns
/// (counted by subset-sum over the doubled ranks, which are integers);
/// otherwise a normal approximation with continuity correction is used.
pub fn wilcoxon_signed_rank(a: &[f64], b: &[f64]) -> Result<WilcoxonResult, StatsError> {
    if a.len() != b.len() {
        return Err(StatsError::UnequalLengths(a.len(), b.len()));
    }
    if a.len() < 5 {
        return Err(StatsError::TooFewSamples {
            need: 5,
            got: a.len(),
        });
    }
    let diffs: Vec<f64> = a
        .iter()
        .zip(b)
        .map(|(x, y)| x - y)
        .filter(|d| *d != 0.0)
        .collect();
    if diffs.is_empty() {
        return Err(StatsError::AllDifferencesZero);
    }
    let n = diffs.len();
    let abs: Vec<f64> = diffs.iter().map(|d| d.abs()).collect();
    let ranks = average_ranks(&abs);
    let mut w_plus = 0.0;
    let mut w_minus = 0.0;
    for (d, r) in diffs.iter().zip(&ranks) {
        if *d > 0.0 {
            w_plus += r;
        } else {
            w_minus += r;
        }
    }
    let statistic = w_plus.min(w_minus);

    let p_value = if n <= WILCOXON_EXACT_LIMIT {
        exact_two_sided_p(&ranks, statistic)
    } else {
        normal_two_sided_p(&ranks, statistic, n)
    };
    Ok(WilcoxonResult {
        statistic,
        p_value,
        n_used: n,
        exact: n <= WILCOXON_EXACT_LIMIT,
    })
}

/// Exact `min(1, 2 P(W+ <= w))` over all sign patterns.
///
/// Average ranks are half-integers, so doubled ranks are integers and the
/// null distribution of `2 W+` is a subset-sum count. Counts stay below
/// `2^25`, exactly representable in f64.
fn exact_two_sided_p(ranks: &[f64], statistic: f64) -> f64 {
    let doubled: Vec<usize> = ranks.iter().map(|r| (2.0 * r).round() as usize).collect();
    let total: usize = doubled.iter().sum();
    let target = (2.0 * statistic).round() as usize;
    let mut counts = vec![0.0f64; total + 1];
    counts[0] = 1.0;
    let mut reach = 0usize;
    for &w in &doubled {
        reach = (reach + w).min(total);
        for s in (0..=reach).rev() {
            if s >= w && counts[s - w] > 0.0 {
                counts[s] += counts[s - w];
            }
        }
    }
    let tail: f64 = counts[..=target.min(total)].iter().sum();
    let patterns = 2.0f64.powi(ranks.len() as i32);
    (2.0 * tail / patterns).min(1.0)
}

fn normal_two_sided_p(ranks: &[f64], statistic: f64, n: usize) -> f64 {
    let nf = n as f64;
    let mean = nf * (nf + 1.0) / 4.0;
    // tie correction: subtract sum(t^3 - t)/48 over tie groups
    let mut sorted = ranks.to_vec();
    sorted.sort_by(f64::total_cmp);
    let mut tie_term = 0.0;
    let mut i = 0;
    while i < sorted.len() {
        let mut j = i;
        while j + 1 < sorted.len() && sorted[j + 1] == sorted[i] {
            j += 1;
        }
        let t = (j - i + 1) as f64;
        tie_term += t * t * t - t;
        i = j + 1;
    }
    let variance = nf * (nf + 1.0) * (2.0 * nf + 1.0) / 24.0 - tie_term / 48.0;
    if variance <= 0.0 {
        return 1.0;
    }
    // statistic <= mean by construction; continuity correction toward center
    let z = (statistic - mean + 0.5) / variance.sqrt();
    let normal = Normal::new(0.0, 1.0).expect("unit normal");
    (2.0 * normal.cdf(z)).clamp(0.0, 1.0)
}

/// Friedman mean ranks: within each run (row), algorithms are ranked by cost
/// ascending with average ranks on ties; the result is the per-algorithm mean
/// over runs. Lower is better.
pub fn friedman_ranks(matrix: &[Vec<f64>]) -> Result<Vec<f64>, StatsError> {
    if matrix.len() < 2 {
        return Err(StatsError::TooFewSamples {
            need: 2,
            got: matrix.len(),
        });
    }
    let k = matrix[0].len();
    if k < 2 {
        return Err(StatsError::TooFewAlgorithms(k));
    }
    if matrix.iter().any(|row| row.len() != k) {
        return Err(StatsError::RaggedMatrix);
    }
    let mut sums = vec![0.0; k];
    for row in matrix {
        for (s, r) in sums.iter_mut().zip(average_ranks(row)) {
            *s += r;
        }
    }
    let runs = matrix.len() as f64;
    Ok(sums.into_iter().map(|s| s / runs).collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn ranks_with_ties() {
        assert_eq!(average_ranks(&[3.0, 1.0, 2.0]), vec![3.0, 1.0, 2.0]);
        assert_eq!(average_ranks(&[1.0, 1.0, 2.0]), vec![1.5, 1.5, 3.0]);
        assert_eq!(average_ranks(&[2.0, 2.0, 2.0, 2.0]), vec![2.5; 4]);
    }

    #[test]
    fn wilcoxon_all_equal_is_undefined() {
        let a = [1.0, 2.0, 3.0, 4.0, 5.0];
        assert_eq!(
            wilcoxon_signed_rank(&a, &a),
            Err(StatsError::AllDifferencesZero)
        );
    }

    #[test]
    fn wilcoxon_shifted_sequence_exact() {
        // all differences -1: statistic 0, exact two-sided p = 2/2^6
        let a = [1.0, 2.0, 3.0, 4.0, 5.0, 6.0];
        let b = [2.0, 3.0, 4.0, 5.0, 6.0, 7.0];
        let r = wilcoxon_signed_rank(&a, &b).unwrap();
        assert_eq!(r.statistic, 0.0);
        assert!(r.exact);
        assert_relative_eq!(r.p_value, 2.0 / 64.0, epsilon = 1e-15);
    }

    #[test]
    fn wilcoxon_rejects_bad_input() {
        assert!(matches!(
            wilcoxon_signed_rank(&[1.0, 2.0], &[1.0]),
            Err(StatsError::UnequalLengths(2, 1))
        ));
        assert!(matches!(
            wilcoxon_signed_rank(&[1.0; 4], &[2.0; 4]),
            Err(StatsError::TooFewSamples { need: 5, got: 4 })
        ));
    }

    #[test]
    fn wilcoxon_separated_25_samples() {
        let a: Vec<f64> = (0..25).map(|i| 0.1 + i as f64 * 0.01).collect();
        let b: Vec<f64> = (0..25).map(|i| 1.0 + i as f64 * 0.01).collect();
        let r = wilcoxon_signed_rank(&a, &b).unwrap();
        assert!(r.exact);
        assert_eq!(r.statistic, 0.0);
        assert!(r.p_value < 0.01, "p = {}", r.p_value);
    }

    #[test]
    fn wilcoxon_normal_branch_on_large_n() {
        // n = 40 forces the approximation; a clear one-sided shift
        let a: Vec<f64> = (0..40).map(|i| i as f64).collect();
        let b: Vec<f64> = (0..40).map(|i| i as f64 + 3.0).collect();
        let r = wilcoxon_signed_rank(&a, &b).unwrap();
        assert!(!r.exact);
        assert!(r.p_value < 1e-6);
    }

    #[test]
    fn friedman_hand_example() {
        // 3 runs x 2 algorithms: [[1,2],[1,2],[2,1]] -> (4/3, 5/3)
        let m = vec![vec![1.0, 2.0], vec![1.0, 2.0], vec![2.0, 1.0]];
        let r = friedman_ranks(&m).unwrap();
        assert_relative_eq!(r[0], 4.0 / 3.0, epsilon = 1e-15);
        assert_relative_eq!(r[1], 5.0 / 3.0, epsilon = 1e-15);
    }

    #[test]
    fn friedman_dominant_and_tied_columns() {
        let m = vec![vec![0.1, 0.5, 0.5], vec![0.2, 0.9, 0.9], vec![0.05, 1.0, 1.0]];
        let r = friedman_ranks(&m).unwrap();
        assert_eq!(r[0], 1.0);
        assert_eq!(r[1], r[2]);
        // rank sum preserved: k(k+1)/2 per run
        assert_relative_eq!(r.iter().sum::<f64>(), 6.0, epsilon = 1e-12);
    }

    #[test]
    fn friedman_rejects_degenerate_shapes() {
        assert!(friedman_ranks(&[vec![1.0, 2.0]]).is_err());
        assert!(friedman_ranks(&[vec![1.0], vec![2.0]]).is_err());
        assert!(friedman_ranks(&[vec![1.0, 2.0], vec![1.0]]).is_err());
    }
}
