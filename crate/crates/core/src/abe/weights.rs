//! Feature weighting schemes for analogy retrieval.
//!
//! Eight schemes with the same shape as the published reviews: a uniform
//! baseline, two correlation measures, a variance-explained ratio, three
//! bin-count measures that require discretization, and a relief-style
//! neighborhood estimator. All return non-negative weights normalized to
//! mean one; degenerate inputs fall back to uniform.

use crate::abe::config::{Discretization, WeightScheme};
use crate::abe::discretize::discretize;
use crate::error::{Error, Result};

/// Compute weights over normalized feature rows against their efforts.
/// `bins` is the bin budget handed to the discretizer when the scheme
/// needs one.
pub fn feature_weights(
    rows: &[Vec<f64>],
    efforts: &[f64],
    scheme: WeightScheme,
    disc: Discretization,
    bins: usize,
) -> Result<Vec<f64>> {
    if rows.is_empty() || rows.len() != efforts.len() {
        return Err(Error::InvalidArgument(
            "weighting requires matched non-empty rows and efforts".into(),
        ));
    }
    if scheme.needs_discretization() && disc == Discretization::None {
        return Err(Error::InvalidConfig(format!(
            "scheme {:?} requires a discretizer",
            scheme
        )));
    }
    let n_features = rows[0].len();
    let raw: Vec<f64> = match scheme {
        WeightScheme::Uniform => vec![1.0; n_features],
        WeightScheme::Pearson => per_column(rows, |col| pearson(col, efforts).abs()),
        WeightScheme::Spearman => {
            let effort_ranks = midranks(efforts);
            per_column(rows, |col| pearson(&midranks(col), &effort_ranks).abs())
        }
        WeightScheme::VarianceRatio => per_column(rows, |col| eta_squared(col, efforts)),
        WeightScheme::InfoGain | WeightScheme::GainRatio => {
            let ybins = discretize(efforts, disc, bins);
            let hy = entropy(&ybins);
            per_column(rows, |col| {
                let fbins = discretize(col, disc, bins);
                let gain = hy - conditional_entropy(&ybins, &fbins);
                match scheme {
                    WeightScheme::InfoGain => gain.max(0.0),
                    _ => {
                        let hf = entropy(&fbins);
                        if hf <= 1e-12 {
                            0.0
                        } else {
                            (gain / hf).max(0.0)
                        }
                    }
                }
            })
        }
        WeightScheme::ChiSquared => {
            let ybins = discretize(efforts, disc, bins);
            per_column(rows, |col| {
                let fbins = discretize(col, disc, bins);
                chi_squared(&fbins, &ybins)
            })
        }
        WeightScheme::Relief => relief(rows, efforts),
    };
    Ok(normalize_mean_one(raw))
}

fn per_column(rows: &[Vec<f64>], f: impl Fn(&[f64]) -> f64) -> Vec<f64> {
    (0..rows[0].len())
        .map(|c| {
            let col: Vec<f64> = rows.iter().map(|r| r[c]).collect();
            f(&col)
        })
        .collect()
}

fn normalize_mean_one(mut w: Vec<f64>) -> Vec<f64> {
    for v in w.iter_mut() {
        if !v.is_finite() || *v < 0.0 {
            *v = 0.0;
        }
    }
    let total: f64 = w.iter().sum();
    if total <= 1e-12 {
        return vec![1.0; w.len()];
    }
    let scale = w.len() as f64 / total;
    w.iter().map(|v| v * scale).collect()
}

pub fn pearson(xs: &[f64], ys: &[f64]) -> f64 {
    let n = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let mut sxy = 0.0;
    let mut sxx = 0.0;
    let mut syy = 0.0;
    for (x, y) in xs.iter().zip(ys) {
        sxy += (x - mx) * (y - my);
        sxx += (x - mx) * (x - mx);
        syy += (y - my) * (y - my);
    }
    if sxx <= 1e-24 || syy <= 1e-24 {
        0.0
    } else {
        sxy / (sxx * syy).sqrt()
    }
}

pub fn midranks(xs: &[f64]) -> Vec<f64> {
    let n = xs.len();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| xs[a].partial_cmp(&xs[b]).unwrap().then(a.cmp(&b)));
    let mut ranks = vec![0.0; n];
    let mut i = 0;
    while i < n {
        let mut j = i;
        while j + 1 < n && xs[order[j + 1]] == xs[order[i]] {
            j += 1;
        }
        let rank = (i + j) as f64 / 2.0 + 1.0;
        for &idx in &order[i..=j] {
            ranks[idx] = rank;
        }
        i = j + 1;
    }
    ranks
}

/// Effort variance explained by a median split of the feature.
fn eta_squared(col: &[f64], efforts: &[f64]) -> f64 {
    let med = crate::metrics::median(col);
    let (mut lo, mut hi) = (Vec::new(), Vec::new());
    for (x, e) in col.iter().zip(efforts) {
        if *x <= med {
            lo.push(*e);
        } else {
            hi.push(*e);
        }
    }
    if lo.is_empty() || hi.is_empty() {
        return 0.0;
    }
    let mean = efforts.iter().sum::<f64>() / efforts.len() as f64;
    let total: f64 = efforts.iter().map(|e| (e - mean).powi(2)).sum();
    if total <= 1e-24 {
        return 0.0;
    }
    let group_mean = |g: &[f64]| g.iter().sum::<f64>() / g.len() as f64;
    let between = lo.len() as f64 * (group_mean(&lo) - mean).powi(2)
        + hi.len() as f64 * (group_mean(&hi) - mean).powi(2);
    (between / total).clamp(0.0, 1.0)
}

fn entropy(bins: &[usize]) -> f64 {
    let n = bins.len() as f64;
    let max = bins.iter().max().copied().unwrap_or(0);
    let mut counts = vec![0usize; max + 1];
    for &b in bins {
        counts[b] += 1;
    }
    counts
        .iter()
        .filter(|&&c| c > 0)
        .map(|&c| {
            let p = c as f64 / n;
            -p * p.ln()
        })
        .sum()
}

fn conditional_entropy(ybins: &[usize], fbins: &[usize]) -> f64 {
    let n = ybins.len() as f64;
    let fmax = fbins.iter().max().copied().unwrap_or(0);
    let mut grouped: Vec<Vec<usize>> = vec![Vec::new(); fmax + 1];
    for (&y, &f) in ybins.iter().zip(fbins) {
        grouped[f].push(y);
    }
    grouped
        .iter()
        .filter(|g| !g.is_empty())
        .map(|g| g.len() as f64 / n * entropy(g))
        .sum()
}

fn chi_squared(fbins: &[usize], ybins: &[usize]) -> f64 {
    let n = fbins.len() as f64;
    let fmax = fbins.iter().max().copied().unwrap_or(0) + 1;
    let ymax = ybins.iter().max().copied().unwrap_or(0) + 1;
    let mut observed = vec![vec![0.0; ymax]; fmax];
    let mut row_tot = vec![0.0; fmax];
    let mut col_tot = vec![0.0; ymax];
    for (&f, &y) in fbins.iter().zip(ybins) {
        observed[f][y] += 1.0;
        row_tot[f] += 1.0;
        col_tot[y] += 1.0;
    }
    let mut chi = 0.0;
    for f in 0..fmax {
        for y in 0..ymax {
            let expected = row_tot[f] * col_tot[y] / n;
            if expected > 0.0 {
                chi += (observed[f][y] - expected).powi(2) / expected;
            }
        }
    }
    chi
}

/// Relief adapted to regression: weight features by how much their
/// differences track effort differences across each row's nearest
/// neighbors (k = 5, unweighted Euclidean on the normalized rows).
fn relief(rows: &[Vec<f64>], efforts: &[f64]) -> Vec<f64> {
    let n = rows.len();
    let n_features = rows[0].len();
    if n < 2 {
        return vec![1.0; n_features];
    }
    let e_min = efforts.iter().cloned().fold(f64::INFINITY, f64::min);
    let e_max = efforts.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    let scale = e_max - e_min;
    if scale <= 0.0 {
        return vec![1.0; n_features];
    }
    let k = 5.min(n - 1);
    let pair_weight = 1.0 / (n * k) as f64;
    let mut n_dc = 0.0;
    let mut n_da = vec![0.0; n_features];
    let mut n_dcda = vec![0.0; n_features];
    for a in 0..n {
        let mut neighbors: Vec<(f64, usize)> = (0..n)
            .filter(|&b| b != a)
            .map(|b| {
                let d: f64 = rows[a]
                    .iter()
                    .zip(&rows[b])
                    .map(|(x, y)| (x - y) * (x - y))
                    .sum();
                (d, b)
            })
            .collect();
        neighbors.sort_by(|x, y| x.0.partial_cmp(&y.0).unwrap().then(x.1.cmp(&y.1)));
        for &(_, b) in neighbors.iter().take(k) {
            let dy = (efforts[a] - efforts[b]).abs() / scale;
            n_dc += pair_weight * dy;
            for f in 0..n_features {
                let df = (rows[a][f] - rows[b][f]).abs();
                n_da[f] += pair_weight * df;
                n_dcda[f] += pair_weight * dy * df;
            }
        }
    }
    if n_dc <= 1e-12 || n_dc >= 1.0 - 1e-12 {
        return vec![1.0; n_features];
    }
    (0..n_features)
        .map(|f| {
            let w = n_dcda[f] / n_dc - (n_da[f] - n_dcda[f]) / (1.0 - n_dc);
            w.max(0.0)
        })
        .collect()
}
