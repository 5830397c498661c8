//! Random choice: evaluate N fresh valid samples, return the best.

use crate::configspace::{Candidate, Space};
use crate::error::{Error, Result};
use crate::optimizers::{sample_fresh, Objective};
use crate::seeding;

/// Default evaluation budget, matched to the differential-evolution total
/// (population 20 + 20 x 10 generations) so comparisons stay fair.
pub const DEFAULT_EVALS: usize = 220;

pub fn random_search(
    space: &Space,
    objective: &mut Objective,
    evals: usize,
    seed: u64,
) -> Result<Candidate> {
    if evals < 1 {
        return Err(Error::InvalidArgument("evals must be >= 1".into()));
    }
    let mut rng = seeding::rng(seed);
    let mut best: Option<(f64, Candidate)> = None;
    for _ in 0..evals {
        let candidate = sample_fresh(space, objective, &mut rng)?;
        let score = objective.eval(space, &candidate);
        if best.as_ref().is_none_or(|(b, _)| score < *b) {
            best = Some((score, candidate));
        }
    }
    Ok(best.expect("evals >= 1").1)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::configspace::{aben_space, cart_space};

    fn target_distance(c: &Candidate) -> f64 {
        // Distance to a known target setting inside the tree space.
        (c.real(0) - 0.7).abs()
            + (c.int(1) - 7).abs() as f64 / 11.0
            + (c.int(2) - 3).abs() as f64 / 20.0
            + (c.int(3) - 2).abs() as f64 / 11.0
    }

    #[test]
    fn single_evaluation_returns_that_sample() {
        let space = cart_space();
        let mut obj = Objective::new(target_distance);
        let best = random_search(&space, &mut obj, 1, 5).unwrap();
        assert_eq!(obj.true_evals(), 1);
        assert_eq!(space.token(&best), obj.trace()[0].token);
    }

    #[test]
    fn counter_equals_the_budget() {
        let space = aben_space();
        let mut obj = Objective::new(|_: &Candidate| 1.0);
        random_search(&space, &mut obj, 220, 9).unwrap();
        assert_eq!(obj.true_evals(), 220);
    }

    #[test]
    fn best_score_is_non_increasing_in_the_budget() {
        let space = cart_space();
        let mut last = f64::INFINITY;
        for n in [10, 100, 1000] {
            let mut obj = Objective::new(target_distance);
            let best = random_search(&space, &mut obj, n, 77).unwrap();
            let score = target_distance(&best);
            assert!(
                score <= last + 1e-12,
                "budget {n} worsened the best score: {score} > {last}"
            );
            last = score;
        }
    }

    #[test]
    fn deterministic_per_seed() {
        let space = aben_space();
        let mut a = Objective::new(|c: &Candidate| c.choice(5) as f64);
        let mut b = Objective::new(|c: &Candidate| c.choice(5) as f64);
        let x = random_search(&space, &mut a, 50, 3).unwrap();
        let y = random_search(&space, &mut b, 50, 3).unwrap();
        assert_eq!(space.token(&x), space.token(&y));
    }
}
