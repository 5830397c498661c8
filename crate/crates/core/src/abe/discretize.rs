//! Column discretization for the weighting schemes that need bins.

use crate::abe::config::Discretization;

/// Bin index per value. `EqualWidth` slices `[min, max]` into equal
/// intervals; `EqualFrequency` deals rank blocks of `ceil(n / bins)`;
/// `None` passes values through as dense ranks of their unique value, so
/// distinct values stay distinct.
pub fn discretize(column: &[f64], kind: Discretization, bins: usize) -> Vec<usize> {
    assert!(bins >= 2, "bins must be >= 2");
    if column.is_empty() {
        return Vec::new();
    }
    match kind {
        Discretization::None => {
            let mut unique: Vec<f64> = column.to_vec();
            unique.sort_by(|a, b| a.partial_cmp(b).unwrap());
            unique.dedup();
            column
                .iter()
                .map(|v| unique.partition_point(|u| u < v))
                .collect()
        }
        Discretization::EqualWidth => {
            let min = column.iter().cloned().fold(f64::INFINITY, f64::min);
            let max = column.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
            let span = max - min;
            if span <= 0.0 {
                return vec![0; column.len()];
            }
            let width = span / bins as f64;
            column
                .iter()
                .map(|v| (((v - min) / width) as usize).min(bins - 1))
                .collect()
        }
        Discretization::EqualFrequency => {
            let mut order: Vec<usize> = (0..column.len()).collect();
            order.sort_by(|&a, &b| {
                column[a]
                    .partial_cmp(&column[b])
                    .unwrap()
                    .then(a.cmp(&b))
            });
            let block = column.len().div_ceil(bins);
            let mut out = vec![0usize; column.len()];
            for (rank, &i) in order.iter().enumerate() {
                out[i] = (rank / block).min(bins - 1);
            }
            out
        }
    }
}
