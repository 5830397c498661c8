//! Transformed linear-model baseline.
//!
//! Continuous features get whichever of {identity, sqrt, log(x+1)} leaves
//! their sample skewness closest to zero; categorical features are
//! dummy-coded against a reference level. Coefficients come from a
//! minimum-norm least-squares fit, so collinear dummies on small datasets
//! degrade gracefully instead of failing.

use nalgebra::{DMatrix, DVector};

use crate::dataset::Dataset;
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Transform {
    Identity,
    Sqrt,
    Log,
}

impl Transform {
    pub fn apply(self, x: f64) -> f64 {
        match self {
            Transform::Identity => x,
            Transform::Sqrt => x.max(0.0).sqrt(),
            Transform::Log => (x + 1.0).ln(),
        }
    }
}

/// Adjusted Fisher-Pearson sample skewness; zero for degenerate columns.
pub fn sample_skewness(xs: &[f64]) -> f64 {
    let n = xs.len() as f64;
    if xs.len() < 3 {
        return 0.0;
    }
    let mean = xs.iter().sum::<f64>() / n;
    let m2 = xs.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / n;
    let m3 = xs.iter().map(|x| (x - mean).powi(3)).sum::<f64>() / n;
    if m2 <= 1e-24 {
        return 0.0;
    }
    let g1 = m3 / m2.powf(1.5);
    g1 * (n * (n - 1.0)).sqrt() / (n - 2.0)
}

#[derive(Debug, Clone)]
enum FeatureEncoding {
    Continuous(Transform),
    /// Non-reference levels observed in training, in ascending code order.
    Categorical { levels: Vec<f64> },
}

#[derive(Debug, Clone)]
pub struct AtlmModel {
    encodings: Vec<FeatureEncoding>,
    /// Intercept first, then one coefficient per design column.
    pub coefficients: Vec<f64>,
}

impl AtlmModel {
    pub fn fit(train: &Dataset, categorical_mask: &[bool]) -> Result<AtlmModel> {
        if categorical_mask.len() != train.n_features() {
            return Err(Error::ArityMismatch {
                expected: train.n_features(),
                got: categorical_mask.len(),
            });
        }
        if train.n_rows() < 2 {
            return Err(Error::InvalidData(
                "transformed linear model needs at least 2 rows".into(),
            ));
        }
        let mut encodings = Vec::with_capacity(train.n_features());
        for (f, &is_cat) in categorical_mask.iter().enumerate() {
            let col: Vec<f64> = train.rows.iter().map(|r| r[f]).collect();
            if is_cat {
                let mut levels = col.clone();
                levels.sort_by(|a, b| a.partial_cmp(b).unwrap());
                levels.dedup();
                // First level is the reference and gets no column.
                encodings.push(FeatureEncoding::Categorical {
                    levels: levels[1..].to_vec(),
                });
            } else {
                encodings.push(FeatureEncoding::Continuous(choose_transform(&col)));
            }
        }

        let design: Vec<Vec<f64>> = train
            .rows
            .iter()
            .map(|row| design_row(&encodings, row))
            .collect();
        let n = design.len();
        let p = design[0].len();
        let x = DMatrix::from_fn(n, p, |i, j| design[i][j]);
        let y = DVector::from_fn(n, |i, _| train.efforts[i]);
        let svd = x.svd(true, true);
        let max_singular = svd
            .singular_values
            .iter()
            .cloned()
            .fold(0.0f64, f64::max);
        let eps = (max_singular * 1e-12).max(1e-300);
        let beta = svd
            .solve(&y, eps)
            .map_err(|e| Error::InvalidData(format!("singular design matrix: {e}")))?;
        Ok(AtlmModel {
            encodings,
            coefficients: beta.iter().cloned().collect(),
        })
    }

    pub fn predict(&self, row: &[f64]) -> Result<f64> {
        if row.len() != self.encodings.len() {
            return Err(Error::ArityMismatch {
                expected: self.encodings.len(),
                got: row.len(),
            });
        }
        let design = design_row(&self.encodings, row);
        Ok(design
            .iter()
            .zip(&self.coefficients)
            .map(|(x, b)| x * b)
            .sum())
    }

    pub fn transform_of(&self, feature: usize) -> Option<Transform> {
        match self.encodings.get(feature)? {
            FeatureEncoding::Continuous(t) => Some(*t),
            FeatureEncoding::Categorical { .. } => None,
        }
    }

    /// Width of the expanded design matrix, intercept included.
    pub fn design_width(&self) -> usize {
        self.coefficients.len()
    }

    /// Sum of squared training residuals for an arbitrary coefficient
    /// vector; lets tests probe least-squares optimality directly.
    pub fn sse_of(&self, coefficients: &[f64], train: &Dataset) -> f64 {
        train
            .rows
            .iter()
            .zip(&train.efforts)
            .map(|(row, e)| {
                let design = design_row(&self.encodings, row);
                let pred: f64 = design.iter().zip(coefficients).map(|(x, b)| x * b).sum();
                (e - pred).powi(2)
            })
            .sum()
    }
}

/// Pick the transform whose transformed column has minimal |skewness|.
/// Sqrt and log are candidates only for non-negative columns; ties prefer
/// the weaker transform (identity, then sqrt, then log).
fn choose_transform(col: &[f64]) -> Transform {
    let non_negative = col.iter().all(|&v| v >= 0.0);
    let mut best = Transform::Identity;
    let mut best_skew = sample_skewness(col).abs();
    if non_negative {
        for t in [Transform::Sqrt, Transform::Log] {
            let transformed: Vec<f64> = col.iter().map(|&v| t.apply(v)).collect();
            let skew = sample_skewness(&transformed).abs();
            if skew < best_skew {
                best_skew = skew;
                best = t;
            }
        }
    }
    best
}

fn design_row(encodings: &[FeatureEncoding], row: &[f64]) -> Vec<f64> {
    let mut out = vec![1.0];
    for (enc, &v) in encodings.iter().zip(row) {
        match enc {
            FeatureEncoding::Continuous(t) => out.push(t.apply(v)),
            FeatureEncoding::Categorical { levels } => {
                // Unseen levels leave every dummy at zero (reference level).
                for &level in levels {
                    out.push(if v == level { 1.0 } else { 0.0 });
                }
            }
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::seeding::{rand_f64, rng};
    use approx::assert_relative_eq;

    fn linear_ds() -> Dataset {
        // Symmetric x keeps identity as the skew-minimizing transform.
        let rows: Vec<Vec<f64>> = (0..11).map(|i| vec![i as f64]).collect();
        let efforts: Vec<f64> = rows.iter().map(|r| 3.0 + 2.0 * r[0]).collect();
        Dataset::new("lin", vec!["x".into()], rows, efforts).unwrap()
    }

    #[test]
    fn recovers_noise_free_linear_data() {
        let d = linear_ds();
        let m = AtlmModel::fit(&d, &[false]).unwrap();
        assert_eq!(m.transform_of(0), Some(Transform::Identity));
        assert_relative_eq!(m.coefficients[0], 3.0, epsilon = 1e-6);
        assert_relative_eq!(m.coefficients[1], 2.0, epsilon = 1e-6);
        for row in &d.rows {
            assert_relative_eq!(
                m.predict(row).unwrap(),
                3.0 + 2.0 * row[0],
                epsilon = 1e-6
            );
        }
    }

    #[test]
    fn log_symmetric_column_selects_log() {
        // exp(k) - 1 so that log(x + 1) = k exactly, a symmetric sequence.
        let col: Vec<f64> = (0..9).map(|k| (k as f64).exp() - 1.0).collect();
        // Oracle: numeric skewness comparison of the three candidates.
        let skew_id = sample_skewness(&col).abs();
        let sqrt_col: Vec<f64> = col.iter().map(|v| v.sqrt()).collect();
        let skew_sqrt = sample_skewness(&sqrt_col).abs();
        let log_col: Vec<f64> = col.iter().map(|v| (v + 1.0).ln()).collect();
        let skew_log = sample_skewness(&log_col).abs();
        assert!(skew_log < skew_sqrt && skew_log < skew_id);

        let rows: Vec<Vec<f64>> = col.iter().map(|&v| vec![v]).collect();
        let efforts: Vec<f64> = col.iter().map(|&v| (v + 1.0).ln() * 4.0 + 1.0).collect();
        let d = Dataset::new("logd", vec!["x".into()], rows, efforts).unwrap();
        let m = AtlmModel::fit(&d, &[false]).unwrap();
        assert_eq!(m.transform_of(0), Some(Transform::Log));
    }

    #[test]
    fn three_level_categorical_expands_to_two_dummies() {
        let rows = vec![
            vec![0.0, 1.0],
            vec![1.0, 2.0],
            vec![2.0, 3.0],
            vec![0.0, 4.0],
            vec![1.0, 5.0],
        ];
        let efforts = vec![10.0, 20.0, 30.0, 12.0, 22.0];
        let d = Dataset::new("cat", vec!["kind".into(), "size".into()], rows, efforts).unwrap();
        let m = AtlmModel::fit(&d, &[true, false]).unwrap();
        // intercept + 2 dummies + 1 continuous column
        assert_eq!(m.design_width(), 4);
    }

    #[test]
    fn all_zero_row_with_identity_transforms_returns_intercept() {
        let d = linear_ds();
        let m = AtlmModel::fit(&d, &[false]).unwrap();
        assert_relative_eq!(m.predict(&[0.0]).unwrap(), m.coefficients[0], epsilon = 1e-9);
    }

    #[test]
    fn unseen_categorical_level_falls_back_to_reference() {
        let rows = vec![vec![0.0], vec![1.0], vec![0.0], vec![1.0]];
        let efforts = vec![10.0, 20.0, 10.0, 20.0];
        let d = Dataset::new("cat", vec!["kind".into()], rows, efforts).unwrap();
        let m = AtlmModel::fit(&d, &[true]).unwrap();
        // Level 7 was never seen: all dummies zero, i.e. the reference row.
        assert_relative_eq!(
            m.predict(&[7.0]).unwrap(),
            m.predict(&[0.0]).unwrap(),
            epsilon = 1e-9
        );
    }

    #[test]
    fn coefficients_are_least_squares_optimal() {
        let mut r = rng(41);
        let rows: Vec<Vec<f64>> = (0..15)
            .map(|_| vec![rand_f64(&mut r) * 8.0, rand_f64(&mut r) * 3.0])
            .collect();
        let efforts: Vec<f64> = rows
            .iter()
            .map(|row| 5.0 + row[0] * 2.0 + row[1] + rand_f64(&mut r))
            .collect();
        let d = Dataset::new("ls", vec!["a".into(), "b".into()], rows, efforts).unwrap();
        let m = AtlmModel::fit(&d, &[false, false]).unwrap();
        let base = m.sse_of(&m.coefficients, &d);
        for i in 0..m.coefficients.len() {
            for delta in [-1e-3, 1e-3] {
                let mut perturbed = m.coefficients.clone();
                perturbed[i] += delta;
                assert!(m.sse_of(&perturbed, &d) >= base - 1e-9);
            }
        }
    }

    #[test]
    fn collinear_design_still_fits() {
        // Second column duplicates the first: the design is singular and the
        // minimum-norm solution must still reproduce the targets.
        let rows: Vec<Vec<f64>> = (0..8).map(|i| vec![i as f64, i as f64]).collect();
        let efforts: Vec<f64> = (0..8).map(|i| 1.0 + 3.0 * i as f64).collect();
        let d = Dataset::new("col", vec!["a".into(), "b".into()], rows, efforts).unwrap();
        let m = AtlmModel::fit(&d, &[false, false]).unwrap();
        for (row, e) in d.rows.iter().zip(&d.efforts) {
            assert_relative_eq!(m.predict(row).unwrap(), *e, epsilon = 1e-6);
        }
    }
}
