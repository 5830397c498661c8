//! Differential evolution over [0, 1] candidate encodings.
//!
//! Trials extrapolate between three distinct population members:
//! `y_k = a_k + f * (b_k - c_k)` per mutated coordinate, except two-choice
//! categorical coordinates, which negate the target's value. Crossover
//! mutates each coordinate at probability `cr` with one coordinate always
//! forced. A member is replaced only when its trial scores strictly
//! better, so the population's best never worsens.

use rand_chacha::ChaCha8Rng;

use crate::configspace::{Candidate, ParamKind, Space};
use crate::error::{Error, Result};
use crate::optimizers::{sample_fresh, Objective};
use crate::seeding::{self, rand_below, rand_f64};

#[derive(Debug, Clone, PartialEq)]
pub struct DeParams {
    /// Population size.
    pub np: usize,
    /// Differential weight.
    pub f: f64,
    /// Crossover rate.
    pub cr: f64,
    pub generations: usize,
}

impl Default for DeParams {
    fn default() -> Self {
        DeParams {
            np: 20,
            f: 0.75,
            cr: 0.3,
            generations: 10,
        }
    }
}

#[derive(Debug, Clone)]
pub struct DeResult {
    pub best: Candidate,
    pub best_score: f64,
    /// Population best after initialization and after each generation.
    pub generation_best: Vec<f64>,
}

/// The extrapolation move for numeric coordinates.
pub fn mutate_coordinate(a: f64, b: f64, c: f64, f: f64) -> f64 {
    a + f * (b - c)
}

/// The move for two-choice (boolean) coordinates: negate the target.
pub fn flip_coordinate(x: f64) -> f64 {
    1.0 - x
}

struct Member {
    candidate: Candidate,
    encoding: Vec<f64>,
    score: f64,
}

pub fn de_optimize(
    space: &Space,
    objective: &mut Objective,
    params: &DeParams,
    seed: u64,
) -> Result<DeResult> {
    if params.np < 4 {
        return Err(Error::InvalidArgument(
            "population must hold at least 4 members (target + 3 donors)".into(),
        ));
    }
    if !(params.cr > 0.0 && params.cr <= 1.0) {
        return Err(Error::InvalidArgument("cr must be in (0, 1]".into()));
    }
    if params.f <= 0.0 {
        return Err(Error::InvalidArgument("f must be positive".into()));
    }
    let mut rng = seeding::rng(seed);
    let boolean_dim: Vec<bool> = space
        .specs
        .iter()
        .map(|s| matches!(&s.kind, ParamKind::Choice(c) if c.len() == 2))
        .collect();

    let mut population: Vec<Member> = Vec::with_capacity(params.np);
    for _ in 0..params.np {
        let candidate = sample_fresh(space, objective, &mut rng)?;
        let encoding = space.encode(&candidate)?;
        let score = objective.eval(space, &candidate);
        population.push(Member {
            candidate,
            encoding,
            score,
        });
    }
    let population_best =
        |pop: &[Member]| pop.iter().map(|m| m.score).fold(f64::INFINITY, f64::min);
    let mut generation_best = vec![population_best(&population)];

    for _ in 0..params.generations {
        for i in 0..params.np {
            let trial = make_trial(space, objective, &population, i, params, &boolean_dim, &mut rng)?;
            let score = objective.eval(space, &trial);
            if score < population[i].score {
                let encoding = space.encode(&trial)?;
                population[i] = Member {
                    candidate: trial,
                    encoding,
                    score,
                };
            }
        }
        generation_best.push(population_best(&population));
    }

    let best = population
        .iter()
        .min_by(|a, b| a.score.partial_cmp(&b.score).expect("comparable scores"))
        .expect("population is non-empty");
    Ok(DeResult {
        best: best.candidate.clone(),
        best_score: best.score,
        generation_best,
    })
}

/// Build a trial for member `i`. Trials that decode to an already-scored
/// token are re-drawn so the evaluation budget lands on distinct
/// candidates; after repeated collisions a fresh random candidate steps
/// in.
#[allow(clippy::too_many_arguments)]
fn make_trial(
    space: &Space,
    objective: &Objective,
    population: &[Member],
    i: usize,
    params: &DeParams,
    boolean_dim: &[bool],
    rng: &mut ChaCha8Rng,
) -> Result<Candidate> {
    const ATTEMPTS: usize = 100;
    let np = population.len();
    let dims = space.n_dims();
    for _ in 0..ATTEMPTS {
        let mut donors = [0usize; 3];
        let mut filled = 0;
        while filled < 3 {
            let pick = rand_below(rng, np as u64) as usize;
            if pick != i && !donors[..filled].contains(&pick) {
                donors[filled] = pick;
                filled += 1;
            }
        }
        let (a, b, c) = (
            &population[donors[0]].encoding,
            &population[donors[1]].encoding,
            &population[donors[2]].encoding,
        );
        let target = &population[i].encoding;
        let forced = rand_below(rng, dims as u64) as usize;
        let mut enc = Vec::with_capacity(dims);
        for k in 0..dims {
            let mutate = k == forced || rand_f64(rng) < params.cr;
            if mutate {
                if boolean_dim[k] {
                    enc.push(flip_coordinate(target[k]));
                } else {
                    enc.push(mutate_coordinate(a[k], b[k], c[k], params.f));
                }
            } else {
                enc.push(target[k]);
            }
        }
        let candidate = space.decode(&enc)?;
        if !objective.is_evaluated(&space.token(&candidate)) {
            return Ok(candidate);
        }
    }
    sample_fresh(space, objective, rng)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::configspace::{aben_space, cart_space};
    use approx::assert_relative_eq;

    #[test]
    fn extrapolation_formula() {
        assert_relative_eq!(mutate_coordinate(0.5, 0.8, 0.4, 0.75), 0.8);
    }

    #[test]
    fn boolean_coordinates_negate() {
        assert_relative_eq!(flip_coordinate(1.0), 0.0);
        assert_relative_eq!(flip_coordinate(0.25), 0.75);
    }

    #[test]
    fn default_budget_is_220_true_evaluations() {
        for space in [aben_space(), cart_space()] {
            let mut obj = Objective::new(|c: &Candidate| match c.values[0] {
                crate::configspace::ParamValue::Real(v) => v,
                crate::configspace::ParamValue::Choice(v) => v as f64,
                crate::configspace::ParamValue::Int(v) => v as f64,
            });
            de_optimize(&space, &mut obj, &DeParams::default(), 3).unwrap();
            assert_eq!(obj.true_evals(), 220);
        }
    }

    #[test]
    fn population_best_never_worsens() {
        let space = cart_space();
        for seed in 0..5 {
            let mut obj = Objective::new(|c: &Candidate| {
                (c.real(0) - 0.42).abs() + (c.int(1) - 4).abs() as f64 / 12.0
            });
            let result = de_optimize(&space, &mut obj, &DeParams::default(), seed).unwrap();
            for pair in result.generation_best.windows(2) {
                assert!(pair[1] <= pair[0] + 1e-15);
            }
            assert_eq!(result.generation_best.len(), 11);
        }
    }

    #[test]
    fn deterministic_per_seed() {
        let space = aben_space();
        let score = |c: &Candidate| (c.choice(3) as f64 - 2.0).abs() + c.choice(5) as f64;
        let mut a = Objective::new(score);
        let mut b = Objective::new(score);
        let x = de_optimize(&space, &mut a, &DeParams::default(), 11).unwrap();
        let y = de_optimize(&space, &mut b, &DeParams::default(), 11).unwrap();
        assert_eq!(space.token(&x.best), space.token(&y.best));
        assert_eq!(a.trace().len(), b.trace().len());
    }

    #[test]
    fn improves_toward_a_planted_optimum_in_the_tree_space() {
        let space = cart_space();
        let planted = |c: &Candidate| {
            (c.real(0) - 0.7).abs()
                + (c.int(1) - 7).abs() as f64 / 11.0
                + (c.int(2) - 3).abs() as f64 / 20.0
                + (c.int(3) - 2).abs() as f64 / 11.0
        };
        for seed in [2, 5, 8] {
            let mut obj = Objective::new(planted);
            let result = de_optimize(&space, &mut obj, &DeParams::default(), seed).unwrap();
            assert!(result.best_score <= result.generation_best[0] + 1e-15);
            assert!(
                result.best_score < 0.5,
                "seed {seed}: score {}",
                result.best_score
            );
        }
    }

    #[test]
    fn rejects_tiny_populations() {
        let space = cart_space();
        let mut obj = Objective::new(|_: &Candidate| 0.0);
        let params = DeParams {
            np: 3,
            ..DeParams::default()
        };
        assert!(de_optimize(&space, &mut obj, &params, 0).is_err());
    }
}
