//! Linear programming estimator: coefficients minimizing the sum of
//! absolute residuals (SAR) on the training data.
//!
//! The least-absolute-deviation fit is reformulated as the standard LP
//! `min sum(u_j + w_j)` with one constraint per training row,
//! `sum_i a_i x_ji + u_j - w_j = effort_j`, `u, w >= 0` and `a_i` free
//! (split into positive and negative parts). There is no intercept: the
//! prediction is `a_1 x_1 + ... + a_n x_n`.

use crate::baselines::simplex;
use crate::dataset::Dataset;
use crate::error::{Error, Result};

#[derive(Debug, Clone)]
pub struct Lp4eeModel {
    pub coefficients: Vec<f64>,
    /// Sum of absolute residuals on the training data at the optimum.
    pub sar: f64,
    /// Reduced costs of the LP at termination (optimality certificate:
    /// none is meaningfully negative).
    pub reduced_costs: Vec<f64>,
    pub simplex_iterations: usize,
}

impl Lp4eeModel {
    pub fn fit(train: &Dataset) -> Result<Lp4eeModel> {
        Lp4eeModel::fit_xy(&train.rows, &train.efforts)
    }

    pub fn fit_xy(rows: &[Vec<f64>], efforts: &[f64]) -> Result<Lp4eeModel> {
        if rows.is_empty() {
            return Err(Error::InvalidData("empty training set".into()));
        }
        if rows.len() != efforts.len() {
            return Err(Error::ArityMismatch {
                expected: rows.len(),
                got: efforts.len(),
            });
        }
        let n_features = rows[0].len();
        let n_rows = rows.len();
        // Variable layout: [a+ (F), a- (F), u (J), w (J)].
        let n_vars = 2 * n_features + 2 * n_rows;
        let mut costs = vec![0.0; n_vars];
        for j in 2 * n_features..n_vars {
            costs[j] = 1.0;
        }
        let mut a = Vec::with_capacity(n_rows);
        for (j, row) in rows.iter().enumerate() {
            let mut constraint = vec![0.0; n_vars];
            for (i, &x) in row.iter().enumerate() {
                constraint[i] = x;
                constraint[n_features + i] = -x;
            }
            constraint[2 * n_features + j] = 1.0;
            constraint[2 * n_features + n_rows + j] = -1.0;
            a.push(constraint);
        }
        let cap = 200 * (n_rows + n_vars);
        let sol = simplex::solve(&costs, &a, efforts, cap)?;
        let coefficients = (0..n_features)
            .map(|i| sol.x[i] - sol.x[n_features + i])
            .collect();
        Ok(Lp4eeModel {
            coefficients,
            sar: sol.objective,
            reduced_costs: sol.reduced_costs,
            simplex_iterations: sol.iterations,
        })
    }

    pub fn predict(&self, row: &[f64]) -> Result<f64> {
        if row.len() != self.coefficients.len() {
            return Err(Error::ArityMismatch {
                expected: self.coefficients.len(),
                got: row.len(),
            });
        }
        Ok(self
            .coefficients
            .iter()
            .zip(row)
            .map(|(a, x)| a * x)
            .sum())
    }

    /// SAR of an arbitrary coefficient vector on the given data; used by
    /// tests to cross-check the simplex optimum.
    pub fn sar_of(coefficients: &[f64], rows: &[Vec<f64>], efforts: &[f64]) -> f64 {
        rows.iter()
            .zip(efforts)
            .map(|(row, e)| {
                let pred: f64 = coefficients.iter().zip(row).map(|(a, x)| a * x).sum();
                (e - pred).abs()
            })
            .sum()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::seeding::{rand_f64, rng};
    use approx::assert_relative_eq;

    #[test]
    fn exact_fit_recovers_the_slope() {
        let rows = vec![vec![1.0], vec![2.0], vec![3.0]];
        let efforts = vec![2.0, 4.0, 6.0];
        let m = Lp4eeModel::fit_xy(&rows, &efforts).unwrap();
        assert_relative_eq!(m.coefficients[0], 2.0, epsilon = 1e-7);
        assert!(m.sar.abs() < 1e-7);
        assert_relative_eq!(m.predict(&[5.0]).unwrap(), 10.0, epsilon = 1e-6);
    }

    #[test]
    fn degenerate_pair_lands_on_a_vertex() {
        // Any a in [1, 3] scores SAR = 2; the simplex returns a vertex.
        let rows = vec![vec![1.0], vec![1.0]];
        let efforts = vec![1.0, 3.0];
        let m = Lp4eeModel::fit_xy(&rows, &efforts).unwrap();
        assert_relative_eq!(m.sar, 2.0, epsilon = 1e-8);
        let a = m.coefficients[0];
        assert!(
            (a - 1.0).abs() < 1e-7 || (a - 3.0).abs() < 1e-7,
            "expected a vertex, got a = {a}"
        );
        // Scan oracle: no scanned coefficient beats the simplex SAR.
        for step in 0..=400 {
            let cand = step as f64 / 100.0; // 0.00 .. 4.00
            let sar = Lp4eeModel::sar_of(&[cand], &rows, &efforts);
            assert!(sar >= m.sar - 1e-9);
        }
    }

    #[test]
    fn never_worse_than_least_squares() {
        let mut r = rng(17);
        for _ in 0..20 {
            let rows: Vec<Vec<f64>> = (0..10)
                .map(|_| vec![rand_f64(&mut r) * 10.0, rand_f64(&mut r) * 5.0])
                .collect();
            let efforts: Vec<f64> = rows
                .iter()
                .map(|row| 3.0 * row[0] + 1.5 * row[1] + rand_f64(&mut r) * 4.0)
                .collect();
            let m = Lp4eeModel::fit_xy(&rows, &efforts).unwrap();
            // Independent least-squares route via the normal equations.
            let mut xtx = [[0.0f64; 2]; 2];
            let mut xty = [0.0f64; 2];
            for (row, e) in rows.iter().zip(&efforts) {
                for i in 0..2 {
                    for j in 0..2 {
                        xtx[i][j] += row[i] * row[j];
                    }
                    xty[i] += row[i] * e;
                }
            }
            let det = xtx[0][0] * xtx[1][1] - xtx[0][1] * xtx[1][0];
            assert!(det.abs() > 1e-9);
            let ls = [
                (xty[0] * xtx[1][1] - xty[1] * xtx[0][1]) / det,
                (xty[1] * xtx[0][0] - xty[0] * xtx[1][0]) / det,
            ];
            let sar_ls = Lp4eeModel::sar_of(&ls, &rows, &efforts);
            assert!(
                m.sar <= sar_ls + 1e-6,
                "simplex SAR {} exceeded least-squares SAR {}",
                m.sar,
                sar_ls
            );
        }
    }

    #[test]
    fn reduced_costs_certify_optimality() {
        let mut r = rng(23);
        let rows: Vec<Vec<f64>> = (0..12)
            .map(|_| vec![rand_f64(&mut r) * 4.0, rand_f64(&mut r)])
            .collect();
        let efforts: Vec<f64> = rows
            .iter()
            .map(|row| row[0] * 2.0 + rand_f64(&mut r))
            .collect();
        let m = Lp4eeModel::fit_xy(&rows, &efforts).unwrap();
        assert!(m.reduced_costs.iter().all(|&d| d >= -1e-6));
    }

    #[test]
    fn grid_search_agrees_on_small_instances() {
        let mut r = rng(29);
        for _ in 0..10 {
            let rows: Vec<Vec<f64>> = (0..8)
                .map(|_| vec![0.5 + rand_f64(&mut r), 0.5 + rand_f64(&mut r)])
                .collect();
            let efforts: Vec<f64> = rows
                .iter()
                .map(|row| row[0] + 2.0 * row[1] + rand_f64(&mut r) * 0.5)
                .collect();
            let m = Lp4eeModel::fit_xy(&rows, &efforts).unwrap();
            let mut grid_best = f64::INFINITY;
            for i in -10..=50 {
                for j in -10..=50 {
                    let cand = [i as f64 * 0.1, j as f64 * 0.1];
                    grid_best = grid_best.min(Lp4eeModel::sar_of(&cand, &rows, &efforts));
                }
            }
            // Grid resolution is coarse; the simplex must not be worse.
            assert!(m.sar <= grid_best + 1e-6);
        }
    }
}
