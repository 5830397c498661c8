//! Shared fixtures for the criterion benches.

use estima_core::dataset::Dataset;
use estima_core::seeding::{self, rand_f64};

/// A seeded synthetic effort dataset with mild feature signal.
pub fn synthetic_dataset(rows: usize, features: usize, seed: u64) -> Dataset {
    let mut rng = seeding::rng(seed);
    let matrix: Vec<Vec<f64>> = (0..rows)
        .map(|_| (0..features).map(|_| rand_f64(&mut rng) * 100.0).collect())
        .collect();
    let efforts: Vec<f64> = matrix
        .iter()
        .map(|r| 50.0 + r[0] * 3.0 + r[1 % features] + rand_f64(&mut rng) * 40.0)
        .collect();
    let names = (0..features).map(|i| format!("f{i}")).collect();
    Dataset::new("bench", names, matrix, efforts).expect("valid synthetic data")
}
