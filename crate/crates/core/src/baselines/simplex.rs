//! Dense two-phase simplex for small linear programs.
//!
//! Standard form: minimize `c.x` subject to `A x = b`, `x >= 0`. Rows with
//! negative right-hand sides are sign-flipped on entry. Pivoting uses
//! Bland's rule (lowest eligible index) so cycling cannot occur.

use crate::error::{Error, Result};

const PIVOT_EPS: f64 = 1e-9;
const COST_EPS: f64 = 1e-7;

#[derive(Debug, Clone)]
pub struct SimplexSolution {
    /// Optimal assignment of the original variables.
    pub x: Vec<f64>,
    pub objective: f64,
    /// Reduced costs of the original columns at termination; all are
    /// >= -COST_EPS at a certified optimum.
    pub reduced_costs: Vec<f64>,
    pub iterations: usize,
}

struct Tableau {
    /// m rows of n+1 entries; last entry is the right-hand side.
    rows: Vec<Vec<f64>>,
    basis: Vec<usize>,
    n_cols: usize,
}

impl Tableau {
    fn rhs(&self, i: usize) -> f64 {
        self.rows[i][self.n_cols]
    }

    fn pivot(&mut self, row: usize, col: usize) {
        let factor = self.rows[row][col];
        for v in self.rows[row].iter_mut() {
            *v /= factor;
        }
        for i in 0..self.rows.len() {
            if i == row {
                continue;
            }
            let scale = self.rows[i][col];
            if scale != 0.0 {
                for j in 0..=self.n_cols {
                    let delta = scale * self.rows[row][j];
                    self.rows[i][j] -= delta;
                }
            }
        }
        self.basis[row] = col;
    }

    fn reduced_costs(&self, costs: &[f64]) -> Vec<f64> {
        let mut d = costs.to_vec();
        for (i, &bi) in self.basis.iter().enumerate() {
            let cb = costs[bi];
            if cb != 0.0 {
                for j in 0..self.n_cols {
                    d[j] -= cb * self.rows[i][j];
                }
            }
        }
        d
    }

    fn objective(&self, costs: &[f64]) -> f64 {
        self.basis
            .iter()
            .enumerate()
            .map(|(i, &bi)| costs[bi] * self.rhs(i))
            .sum()
    }

    /// Run simplex with Bland's rule for the given costs. Returns the pivot
    /// count or an error when the cap is exceeded or the LP is unbounded.
    fn optimize(&mut self, costs: &[f64], allowed: &[bool], cap: usize) -> Result<usize> {
        let mut iterations = 0usize;
        loop {
            let d = self.reduced_costs(costs);
            let entering = (0..self.n_cols)
                .find(|&j| allowed[j] && d[j] < -COST_EPS && !self.basis.contains(&j));
            let entering = match entering {
                Some(j) => j,
                None => return Ok(iterations),
            };
            let mut leave: Option<usize> = None;
            let mut best_ratio = f64::INFINITY;
            for i in 0..self.rows.len() {
                let a = self.rows[i][entering];
                if a > PIVOT_EPS {
                    let ratio = self.rhs(i) / a;
                    let better = ratio < best_ratio - PIVOT_EPS
                        || ((ratio - best_ratio).abs() <= PIVOT_EPS
                            && leave.is_some_and(|l| self.basis[i] < self.basis[l]));
                    if leave.is_none() || better {
                        best_ratio = ratio.min(best_ratio);
                        leave = Some(i);
                    }
                }
            }
            let leave = leave.ok_or_else(|| {
                Error::InvalidData("unbounded linear program".into())
            })?;
            self.pivot(leave, entering);
            iterations += 1;
            if iterations > cap {
                return Err(Error::SimplexStalled(iterations));
            }
        }
    }
}

/// Solve `min c.x : A x = b, x >= 0`. `a` holds one constraint per row.
pub fn solve(c: &[f64], a: &[Vec<f64>], b: &[f64], max_iterations: usize) -> Result<SimplexSolution> {
    let m = a.len();
    let n = c.len();
    if b.len() != m || a.iter().any(|row| row.len() != n) {
        return Err(Error::InvalidArgument(
            "inconsistent linear program dimensions".into(),
        ));
    }
    if m == 0 {
        return Ok(SimplexSolution {
            x: vec![0.0; n],
            objective: 0.0,
            reduced_costs: c.to_vec(),
            iterations: 0,
        });
    }

    // Phase 1 tableau with one artificial column per row.
    let n_total = n + m;
    let mut rows = Vec::with_capacity(m);
    for i in 0..m {
        let flip = if b[i] < 0.0 { -1.0 } else { 1.0 };
        let mut row = vec![0.0; n_total + 1];
        for j in 0..n {
            row[j] = flip * a[i][j];
        }
        row[n + i] = 1.0;
        row[n_total] = flip * b[i];
        rows.push(row);
    }
    let mut t = Tableau {
        rows,
        basis: (n..n_total).collect(),
        n_cols: n_total,
    };

    let mut phase1_costs = vec![0.0; n_total];
    for j in n..n_total {
        phase1_costs[j] = 1.0;
    }
    let allowed = vec![true; n_total];
    let cap = max_iterations;
    let mut iterations = t.optimize(&phase1_costs, &allowed, cap)?;

    let scale = 1.0 + b.iter().fold(0.0f64, |acc, v| acc.max(v.abs()));
    if t.objective(&phase1_costs) > 1e-7 * scale {
        return Err(Error::InvalidData("infeasible linear program".into()));
    }

    // Drive leftover artificials out of the basis; drop redundant rows.
    let mut drop_rows = Vec::new();
    for i in 0..t.rows.len() {
        if t.basis[i] >= n {
            let col = (0..n).find(|&j| t.rows[i][j].abs() > PIVOT_EPS);
            match col {
                Some(j) => {
                    t.pivot(i, j);
                    iterations += 1;
                }
                None => drop_rows.push(i),
            }
        }
    }
    for &i in drop_rows.iter().rev() {
        t.rows.remove(i);
        t.basis.remove(i);
    }

    // Phase 2: original costs, artificial columns barred.
    let mut phase2_costs = vec![0.0; n_total];
    phase2_costs[..n].copy_from_slice(c);
    let mut allowed = vec![false; n_total];
    for flag in allowed.iter_mut().take(n) {
        *flag = true;
    }
    iterations += t.optimize(&phase2_costs, &allowed, cap)?;

    let mut x = vec![0.0; n];
    for (i, &bi) in t.basis.iter().enumerate() {
        if bi < n {
            x[bi] = t.rhs(i);
        }
    }
    let reduced = t.reduced_costs(&phase2_costs)[..n].to_vec();
    Ok(SimplexSolution {
        x,
        objective: t.objective(&phase2_costs),
        reduced_costs: reduced,
        iterations,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn solves_a_textbook_lp() {
        // min -3x - 5y : x <= 4, y <= 6, 3x + 2y <= 18 (slacks added).
        let c = vec![-3.0, -5.0, 0.0, 0.0, 0.0];
        let a = vec![
            vec![1.0, 0.0, 1.0, 0.0, 0.0],
            vec![0.0, 1.0, 0.0, 1.0, 0.0],
            vec![3.0, 2.0, 0.0, 0.0, 1.0],
        ];
        let b = vec![4.0, 6.0, 18.0];
        let sol = solve(&c, &a, &b, 1000).unwrap();
        assert_relative_eq!(sol.objective, -36.0, epsilon = 1e-7);
        assert_relative_eq!(sol.x[0], 2.0, epsilon = 1e-7);
        assert_relative_eq!(sol.x[1], 6.0, epsilon = 1e-7);
        assert!(sol.reduced_costs.iter().all(|&d| d >= -1e-7));
    }

    #[test]
    fn handles_negative_rhs_by_row_flip() {
        // x1 - x2 = -2, x1 + x2 = 4 with min x1.
        let c = vec![1.0, 0.0];
        let a = vec![vec![1.0, -1.0], vec![1.0, 1.0]];
        let b = vec![-2.0, 4.0];
        let sol = solve(&c, &a, &b, 1000).unwrap();
        assert_relative_eq!(sol.x[0], 1.0, epsilon = 1e-7);
        assert_relative_eq!(sol.x[1], 3.0, epsilon = 1e-7);
    }

    #[test]
    fn flags_infeasible_programs() {
        // x = 1 and x = 2 cannot both hold.
        let c = vec![1.0];
        let a = vec![vec![1.0], vec![1.0]];
        let b = vec![1.0, 2.0];
        assert!(solve(&c, &a, &b, 1000).is_err());
    }
}
