//! Random-guess and sample-mean baselines for standardized accuracy.

use crate::error::{Error, Result};
use crate::seeding::{self, rand_below};

/// Constant predictor: the mean of the training efforts.
pub fn mean_predictor(train_efforts: &[f64]) -> Result<f64> {
    if train_efforts.is_empty() {
        return Err(Error::InvalidArgument("empty effort list".into()));
    }
    Ok(train_efforts.iter().sum::<f64>() / train_efforts.len() as f64)
}

/// Mean over `runs` of the MAE obtained by predicting each test project
/// with a uniformly sampled training effort. Deterministic per seed.
pub fn random_guess_mae(
    train_efforts: &[f64],
    test_actuals: &[f64],
    runs: usize,
    seed: u64,
) -> Result<f64> {
    if train_efforts.is_empty() || test_actuals.is_empty() {
        return Err(Error::InvalidArgument("empty effort list".into()));
    }
    if runs < 1 {
        return Err(Error::InvalidArgument("runs must be >= 1".into()));
    }
    let mut rng = seeding::rng(seed);
    let k = train_efforts.len() as u64;
    let mut total = 0.0;
    for _ in 0..runs {
        let mut abs_sum = 0.0;
        for &actual in test_actuals {
            let guess = train_efforts[rand_below(&mut rng, k) as usize];
            abs_sum += (actual - guess).abs();
        }
        total += abs_sum / test_actuals.len() as f64;
    }
    Ok(total / runs as f64)
}

/// Closed-form expectation the sampled baseline converges to:
/// `sum_j sum_k |actual_j - effort_k| / (J * K)`.
pub fn exact_guess_mae(train_efforts: &[f64], test_actuals: &[f64]) -> Result<f64> {
    if train_efforts.is_empty() || test_actuals.is_empty() {
        return Err(Error::InvalidArgument("empty effort list".into()));
    }
    let mut total = 0.0;
    for &a in test_actuals {
        for &e in train_efforts {
            total += (a - e).abs();
        }
    }
    Ok(total / (train_efforts.len() * test_actuals.len()) as f64)
}
