//! Order-fixed reductions. Every ensemble statistic goes through these so
//! results do not depend on how the samples were produced.

const LEAF: usize = 32;

/// Pairwise (cascade) summation over the slice in index order.
pub fn pairwise_sum(values: &[f64]) -> f64 {
    if values.len() <= LEAF {
        return values.iter().sum();
    }
    let mid = values.len() / 2;
    pairwise_sum(&values[..mid]) + pairwise_sum(&values[mid..])
}

pub fn mean(values: &[f64]) -> Option<f64> {
    if values.is_empty() {
        None
    } else {
        Some(pairwise_sum(values) / values.len() as f64)
    }
}

/// Mean and standard error of the mean (sample standard deviation over
/// `√n`; zero for a single value).
pub fn mean_and_std_err(values: &[f64]) -> Option<(f64, f64)> {
    let n = values.len();
    let m = mean(values)?;
    if n < 2 {
        return Some((m, 0.0));
    }
    let dev: Vec<f64> = values.iter().map(|v| (v - m) * (v - m)).collect();
    let var = pairwise_sum(&dev) / (n - 1) as f64;
    Some((m, (var / n as f64).sqrt()))
}
