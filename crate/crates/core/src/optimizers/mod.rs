//! The three tuners over any configuration space + objective: random
//! search, differential evolution, and a surrogate-guided sequential
//! optimizer.
//!
//! Each optimizer run owns one [`Objective`]. Scores are memoized by
//! canonical candidate token; the evaluation counter and the trace record
//! true (uncached) evaluations only, which is what the budget audits
//! check. The optimizers are written to spend their whole budget on
//! distinct candidates.

use std::collections::HashMap;

use rand_core::RngCore;

use crate::configspace::{Candidate, Space};
use crate::error::{Error, Result};

pub mod de;
pub mod flash;
pub mod random_search;

pub use de::{de_optimize, DeParams, DeResult};
pub use flash::{flash_optimize, FlashParams};
pub use random_search::{random_search, DEFAULT_EVALS};

/// One true objective evaluation, in evaluation order.
#[derive(Debug, Clone, PartialEq)]
pub struct TraceRow {
    pub index: usize,
    pub token: String,
    pub score: f64,
}

/// A scoring callable with a token-keyed memo cache and an audit trace.
/// Lower scores are better; NaN scores are treated as +inf.
pub struct Objective<'a> {
    f: Box<dyn Fn(&Candidate) -> f64 + Send + Sync + 'a>,
    cache: HashMap<String, f64>,
    trace: Vec<TraceRow>,
}

impl<'a> Objective<'a> {
    pub fn new(f: impl Fn(&Candidate) -> f64 + Send + Sync + 'a) -> Self {
        Objective {
            f: Box::new(f),
            cache: HashMap::new(),
            trace: Vec::new(),
        }
    }

    /// Score a candidate. Cached re-queries return the stored score and do
    /// not advance the evaluation counter.
    pub fn eval(&mut self, space: &Space, candidate: &Candidate) -> f64 {
        let token = space.token(candidate);
        if let Some(&score) = self.cache.get(&token) {
            return score;
        }
        let raw = (self.f)(candidate);
        let score = if raw.is_nan() { f64::INFINITY } else { raw };
        self.trace.push(TraceRow {
            index: self.trace.len(),
            token: token.clone(),
            score,
        });
        self.cache.insert(token, score);
        score
    }

    pub fn is_evaluated(&self, token: &str) -> bool {
        self.cache.contains_key(token)
    }

    /// Count of uncached evaluations so far.
    pub fn true_evals(&self) -> usize {
        self.trace.len()
    }

    pub fn trace(&self) -> &[TraceRow] {
        &self.trace
    }

    pub fn into_trace(self) -> Vec<TraceRow> {
        self.trace
    }
}

/// Sample a valid candidate whose token has not been evaluated yet.
pub(crate) fn sample_fresh<R: RngCore>(
    space: &Space,
    objective: &Objective,
    rng: &mut R,
) -> Result<Candidate> {
    const CAP: usize = 10_000;
    for _ in 0..CAP {
        let candidate = space.sample_valid(rng)?;
        if !objective.is_evaluated(&space.token(&candidate)) {
            return Ok(candidate);
        }
    }
    Err(Error::RejectionExceeded(CAP))
}
