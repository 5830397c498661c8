//! Treatment ranking: the Scott-Knott procedure gated by a non-parametric
//! bootstrap test and the A12 effect size.

use rand_chacha::ChaCha8Rng;

use crate::metrics::{iqr, median};
use crate::seeding::{self, rand_below};

/// Score distribution of one treatment plus its total runtime.
#[derive(Debug, Clone, PartialEq)]
pub struct TreatmentSamples {
    pub token: String,
    pub scores: Vec<f64>,
    pub runtime_seconds: f64,
}

impl TreatmentSamples {
    pub fn new(token: impl Into<String>, scores: Vec<f64>, runtime_seconds: f64) -> Self {
        assert!(!scores.is_empty(), "treatment samples must be non-empty");
        assert!(
            scores.iter().all(|s| s.is_finite()),
            "treatment scores must be finite"
        );
        TreatmentSamples {
            token: token.into(),
            scores,
            runtime_seconds,
        }
    }
}

/// Whether smaller scores are better (error measures) or larger (accuracy).
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Orientation {
    SmallerBetter,
    LargerBetter,
}

#[derive(Debug, Clone, PartialEq)]
pub struct RankEntry {
    pub rank: usize,
    pub token: String,
    pub median: f64,
    pub iqr: f64,
    /// Set on rank-1 rows whose runtime is close to the fastest rank-1 row.
    pub fast: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct RankTable {
    pub entries: Vec<RankEntry>,
}

/// Vargha-Delaney A12: probability that a value drawn from `xs` is bigger
/// than one drawn from `ys`, counting ties as half.
pub fn a12(xs: &[f64], ys: &[f64]) -> f64 {
    assert!(!xs.is_empty() && !ys.is_empty(), "a12 of empty samples");
    let mut wins = 0.0;
    for x in xs {
        for y in ys {
            if x > y {
                wins += 1.0;
            } else if x == y {
                wins += 0.5;
            }
        }
    }
    wins / (xs.len() * ys.len()) as f64
}

fn mean(xs: &[f64]) -> f64 {
    xs.iter().sum::<f64>() / xs.len() as f64
}

fn resample_mean(xs: &[f64], rng: &mut ChaCha8Rng) -> f64 {
    let n = xs.len();
    let mut sum = 0.0;
    for _ in 0..n {
        sum += xs[rand_below(rng, n as u64) as usize];
    }
    sum / n as f64
}

/// Two-sided bootstrap hypothesis test of the mean difference under the
/// pooled-shift null. True when the observed difference is significant at
/// the given confidence. Deterministic per seed.
pub fn bootstrap_significant(
    xs: &[f64],
    ys: &[f64],
    resamples: usize,
    confidence: f64,
    seed: u64,
) -> bool {
    assert!(!xs.is_empty() && !ys.is_empty(), "bootstrap of empty samples");
    assert!(resamples >= 100, "resamples must be >= 100");
    assert!((0.0..1.0).contains(&(1.0 - confidence)));
    let observed = (mean(xs) - mean(ys)).abs();
    if observed == 0.0 {
        return false;
    }
    let pooled = {
        let total: f64 = xs.iter().chain(ys.iter()).sum();
        total / (xs.len() + ys.len()) as f64
    };
    let xs_shift: Vec<f64> = xs.iter().map(|v| v - mean(xs) + pooled).collect();
    let ys_shift: Vec<f64> = ys.iter().map(|v| v - mean(ys) + pooled).collect();
    let mut rng = seeding::rng(seed);
    let mut at_least = 0usize;
    for _ in 0..resamples {
        let d = (resample_mean(&xs_shift, &mut rng) - resample_mean(&ys_shift, &mut rng)).abs();
        if d >= observed - 1e-12 {
            at_least += 1;
        }
    }
    (at_least as f64 / resamples as f64) < (1.0 - confidence)
}

const BOOTSTRAP_RESAMPLES: usize = 1000;
const BOOTSTRAP_CONFIDENCE: f64 = 0.95;
const A12_SMALL_EFFECT: f64 = 0.6;

/// Expected squared-deviation gain of cutting the window after group
/// `cut + 1` groups: `ms/ls * (m.mu - l.mu)^2 + ns/ls * (n.mu - l.mu)^2`
/// where the means pool all measurements in each part.
pub fn e_delta(groups: &[&TreatmentSamples], cut: usize) -> f64 {
    let all: Vec<f64> = groups.iter().flat_map(|g| g.scores.iter().copied()).collect();
    let left: Vec<f64> = groups[..=cut]
        .iter()
        .flat_map(|g| g.scores.iter().copied())
        .collect();
    let right: Vec<f64> = groups[cut + 1..]
        .iter()
        .flat_map(|g| g.scores.iter().copied())
        .collect();
    let (ls, ms, ns) = (all.len() as f64, left.len() as f64, right.len() as f64);
    let mu = mean(&all);
    ms / ls * (mean(&left) - mu).powi(2) + ns / ls * (mean(&right) - mu).powi(2)
}

/// The cut index maximizing `e_delta`, or None for windows of one group.
/// Ties break toward the earliest cut.
pub fn best_cut(groups: &[&TreatmentSamples]) -> Option<usize> {
    if groups.len() < 2 {
        return None;
    }
    let mut best = 0;
    let mut best_gain = e_delta(groups, 0);
    for cut in 1..groups.len() - 1 {
        let gain = e_delta(groups, cut);
        if gain > best_gain {
            best_gain = gain;
            best = cut;
        }
    }
    Some(best)
}

fn split_confirmed(groups: &[&TreatmentSamples], cut: usize, rng_seed: u64) -> bool {
    let left: Vec<f64> = groups[..=cut]
        .iter()
        .flat_map(|g| g.scores.iter().copied())
        .collect();
    let right: Vec<f64> = groups[cut + 1..]
        .iter()
        .flat_map(|g| g.scores.iter().copied())
        .collect();
    let effect = a12(&left, &right);
    let effect = effect.max(1.0 - effect);
    if effect < A12_SMALL_EFFECT {
        return false;
    }
    bootstrap_significant(
        &left,
        &right,
        BOOTSTRAP_RESAMPLES,
        BOOTSTRAP_CONFIDENCE,
        rng_seed,
    )
}

fn rank_window(
    groups: &[&TreatmentSamples],
    seed: u64,
    depth: u64,
    next_rank: &mut usize,
    out: &mut Vec<(String, usize)>,
) {
    let cut = match best_cut(groups) {
        Some(c) => c,
        None => {
            let rank = *next_rank;
            *next_rank += 1;
            out.push((groups[0].token.clone(), rank));
            return;
        }
    };
    let window_seed = seeding::seed_for(seed, &["scott-knott", &depth.to_string(), &groups.len().to_string(), &groups[0].token]);
    if split_confirmed(groups, cut, window_seed) {
        rank_window(&groups[..=cut], seed, depth * 2 + 1, next_rank, out);
        rank_window(&groups[cut + 1..], seed, depth * 2 + 2, next_rank, out);
    } else {
        let rank = *next_rank;
        *next_rank += 1;
        for g in groups {
            out.push((g.token.clone(), rank));
        }
    }
}

/// Rank treatments with the Scott-Knott procedure: sort by median (best
/// first per the orientation), recursively split where the expected
/// mean-difference gain is largest, and accept a split only when the
/// bootstrap test and the A12 effect size agree it is real. Rank-1 rows
/// whose runtime is within twice the fastest rank-1 runtime carry the
/// fast flag.
pub fn scott_knott(
    groups: &[TreatmentSamples],
    orientation: Orientation,
    seed: u64,
) -> RankTable {
    assert!(!groups.is_empty(), "scott_knott needs at least one group");
    let mut sorted: Vec<&TreatmentSamples> = groups.iter().collect();
    sorted.sort_by(|a, b| {
        let (ma, mb) = (median(&a.scores), median(&b.scores));
        let ord = ma.partial_cmp(&mb).expect("finite medians");
        match orientation {
            Orientation::SmallerBetter => ord.then_with(|| a.token.cmp(&b.token)),
            Orientation::LargerBetter => ord.reverse().then_with(|| a.token.cmp(&b.token)),
        }
    });

    let mut ranks: Vec<(String, usize)> = Vec::with_capacity(sorted.len());
    let mut next_rank = 1usize;
    rank_window(&sorted, seed, 0, &mut next_rank, &mut ranks);

    let rank_of = |token: &str| -> usize {
        ranks
            .iter()
            .find(|(t, _)| t == token)
            .map(|(_, r)| *r)
            .expect("every group is ranked")
    };
    let fastest_rank1 = sorted
        .iter()
        .filter(|g| rank_of(&g.token) == 1)
        .map(|g| g.runtime_seconds)
        .fold(f64::INFINITY, f64::min);

    let entries = sorted
        .iter()
        .map(|g| {
            let rank = rank_of(&g.token);
            RankEntry {
                rank,
                token: g.token.clone(),
                median: median(&g.scores),
                iqr: iqr(&g.scores),
                fast: rank == 1 && g.runtime_seconds <= 2.0 * fastest_rank1 + 1e-12,
            }
        })
        .collect();
    RankTable { entries }
}
