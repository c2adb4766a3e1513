//! Order-independent accumulation helpers.
//!
//! Monte-Carlo reductions must give the same bits regardless of worker
//! count, so per-path values are collected in path order and reduced by
//! pairwise summation.

/// Pairwise (cascade) sum. Deterministic for a fixed slice and more accurate
/// than a left fold for long sequences.
pub(crate) fn pairwise_sum(values: &[f64]) -> f64 {
    if values.len() <= 16 {
        return values.iter().sum();
    }
    let mid = values.len() / 2;
    pairwise_sum(&values[..mid]) + pairwise_sum(&values[mid..])
}

/// Mean and standard error of the mean, both via pairwise sums.
/// Requires at least two values.
pub(crate) fn mean_and_stderr(values: &[f64]) -> (f64, f64) {
    let n = values.len();
    assert!(n >= 2, "need at least two samples");
    let mean = pairwise_sum(values) / n as f64;
    let sq: Vec<f64> = values.iter().map(|v| (v - mean) * (v - mean)).collect();
    let var = pairwise_sum(&sq) / (n - 1) as f64;
    (mean, (var / n as f64).sqrt())
}
