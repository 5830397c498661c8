//! Sequential model-based optimization with a regression-tree surrogate.
//!
//! The loop: evaluate a small random archive, fit a default-parameter tree
//! from candidate encodings to their scores, let the tree predict every
//! unevaluated pool member, evaluate the best-predicted one, and repeat
//! until the budget runs out. Acquisition is pure exploitation; prediction
//! ties break by pool order. No pool candidate is evaluated twice.

use crate::cart::{CartParams, TreeModel};
use crate::configspace::{Candidate, Space};
use crate::error::{Error, Result};
use crate::optimizers::Objective;
use crate::seeding::{self, sample_indices};

#[derive(Debug, Clone, PartialEq)]
pub struct FlashParams {
    /// Evaluations spent after the initial pool, one per loop turn.
    pub budget: usize,
    /// Random evaluations seeding the archive.
    pub init: usize,
    /// Pool size drawn from spaces too large to enumerate.
    pub pool_samples: usize,
}

impl Default for FlashParams {
    fn default() -> Self {
        FlashParams {
            budget: 200,
            init: 20,
            pool_samples: 5000,
        }
    }
}

/// Surrogate targets replace non-finite scores with a large penalty so a
/// failed candidate cannot poison the tree fit.
const FAILED_SCORE_PENALTY: f64 = 1e12;

pub fn flash_optimize(
    space: &Space,
    objective: &mut Objective,
    params: &FlashParams,
    seed: u64,
) -> Result<Candidate> {
    if params.init < 2 {
        return Err(Error::InvalidArgument("init must be >= 2".into()));
    }
    let mut rng = seeding::rng(seed);

    // Fixed candidate pool: the whole valid space when enumerable, else a
    // seeded sample deduplicated by token.
    let pool: Vec<Candidate> = if space.is_enumerable() {
        space.enumerate_valid()?
    } else {
        let mut seen = std::collections::HashSet::new();
        let mut pool = Vec::with_capacity(params.pool_samples);
        for _ in 0..params.pool_samples {
            let c = space.sample_valid(&mut rng)?;
            if seen.insert(space.token(&c)) {
                pool.push(c);
            }
        }
        pool
    };
    if pool.len() < params.init {
        return Err(Error::InvalidArgument(format!(
            "candidate pool ({}) smaller than the initial sample ({})",
            pool.len(),
            params.init
        )));
    }

    let encodings: Vec<Vec<f64>> = pool
        .iter()
        .map(|c| space.encode(c))
        .collect::<Result<_>>()?;
    let mut evaluated = vec![false; pool.len()];
    let mut archive_rows: Vec<Vec<f64>> = Vec::with_capacity(params.init + params.budget);
    let mut archive_scores: Vec<f64> = Vec::with_capacity(params.init + params.budget);
    let mut best: Option<(f64, usize)> = None;

    let evaluate = |idx: usize,
                        objective: &mut Objective,
                        evaluated: &mut Vec<bool>,
                        archive_rows: &mut Vec<Vec<f64>>,
                        archive_scores: &mut Vec<f64>,
                        best: &mut Option<(f64, usize)>| {
        let score = objective.eval(space, &pool[idx]);
        evaluated[idx] = true;
        archive_rows.push(encodings[idx].clone());
        archive_scores.push(if score.is_finite() {
            score
        } else {
            FAILED_SCORE_PENALTY
        });
        if best.as_ref().is_none_or(|(b, _)| score < *b) {
            *best = Some((score, idx));
        }
    };

    for idx in sample_indices(&mut rng, pool.len(), params.init) {
        evaluate(
            idx,
            objective,
            &mut evaluated,
            &mut archive_rows,
            &mut archive_scores,
            &mut best,
        );
    }

    let surrogate_params = CartParams::default();
    for _ in 0..params.budget {
        let surrogate = TreeModel::fit_xy(&archive_rows, &archive_scores, &surrogate_params, 0)?;
        let mut pick: Option<(f64, usize)> = None;
        for idx in 0..pool.len() {
            if evaluated[idx] {
                continue;
            }
            let predicted = surrogate.predict(&encodings[idx])?;
            if pick.as_ref().is_none_or(|(p, _)| predicted < *p) {
                pick = Some((predicted, idx));
            }
        }
        match pick {
            // Pool exhausted before the budget: return the archive best.
            None => break,
            Some((_, idx)) => evaluate(
                idx,
                objective,
                &mut evaluated,
                &mut archive_rows,
                &mut archive_scores,
                &mut best,
            ),
        }
    }

    let (_, best_idx) = best.expect("init >= 2 guarantees evaluations");
    Ok(pool[best_idx].clone())
}
