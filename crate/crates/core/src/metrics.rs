//! Error measures: absolute residuals, MRE, MAE, and standardized accuracy.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Magnitude of the relative error, `|actual - predicted| / actual`.
///
/// Callers must exclude rows with non-positive actual effort before calling;
/// a non-positive actual here is a contract bug upstream.
pub fn mre(actual: f64, predicted: f64) -> f64 {
    assert!(actual > 0.0, "mre called with non-positive actual {actual}");
    (actual - predicted).abs() / actual
}

/// Mean absolute error over paired lists.
pub fn mae(actuals: &[f64], predictions: &[f64]) -> Result<f64> {
    if actuals.len() != predictions.len() {
        return Err(Error::ArityMismatch {
            expected: actuals.len(),
            got: predictions.len(),
        });
    }
    if actuals.is_empty() {
        return Err(Error::InvalidArgument("mae of empty lists".into()));
    }
    let sum: f64 = actuals
        .iter()
        .zip(predictions)
        .map(|(a, p)| (a - p).abs())
        .sum();
    Ok(sum / actuals.len() as f64)
}

/// Standardized accuracy in percent: `(1 - mae_model / mae_guess) * 100`.
///
/// 100 for perfect predictions, near zero when no better than random
/// guessing, negative when worse.
pub fn sa(mae_model: f64, mae_guess: f64) -> Result<f64> {
    if mae_guess <= 0.0 {
        return Err(Error::InvalidArgument(format!(
            "sa requires a positive guess baseline, got {mae_guess}"
        )));
    }
    Ok((1.0 - mae_model / mae_guess) * 100.0)
}

/// Median of a non-empty slice.
pub fn median(xs: &[f64]) -> f64 {
    assert!(!xs.is_empty(), "median of empty slice");
    let mut v = xs.to_vec();
    v.sort_by(|a, b| a.partial_cmp(b).expect("non-finite value in median"));
    let n = v.len();
    if n % 2 == 1 {
        v[n / 2]
    } else {
        (v[n / 2 - 1] + v[n / 2]) / 2.0
    }
}

/// Linear-interpolated percentile (the numpy default), `p` in `[0, 100]`.
pub fn percentile(xs: &[f64], p: f64) -> f64 {
    assert!(!xs.is_empty(), "percentile of empty slice");
    assert!((0.0..=100.0).contains(&p));
    let mut v = xs.to_vec();
    v.sort_by(|a, b| a.partial_cmp(b).expect("non-finite value in percentile"));
    let h = (v.len() - 1) as f64 * p / 100.0;
    let lo = h.floor() as usize;
    let hi = h.ceil() as usize;
    v[lo] + (h - lo as f64) * (v[hi] - v[lo])
}

/// Inter-quartile range, 75th minus 25th percentile.
pub fn iqr(xs: &[f64]) -> f64 {
    percentile(xs, 75.0) - percentile(xs, 25.0)
}

/// Median MRE over test rows, skipping rows whose actual effort is not
/// positive (MRE is undefined there). Returns `None` when no row qualifies.
pub fn median_mre(actuals: &[f64], predictions: &[f64]) -> Option<f64> {
    let mres: Vec<f64> = actuals
        .iter()
        .zip(predictions)
        .filter(|(a, _)| **a > 0.0)
        .map(|(a, p)| mre(*a, *p))
        .collect();
    if mres.is_empty() {
        None
    } else {
        Some(median(&mres))
    }
}

/// One cross-validation cell result. `mdmre` and `sa` are percentages.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FoldScore {
    pub treatment: String,
    pub dataset: String,
    pub repeat: usize,
    pub fold: usize,
    pub mdmre: f64,
    pub sa: f64,
    pub seconds: f64,
}
