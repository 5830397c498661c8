//! Pairwise distances between normalized project rows.

use crate::abe::config::Similarity;
use crate::error::{Error, Result};

/// Midrank lookup against the training table, one sorted column per
/// feature. Lets the rank-based distance score rows that were never part
/// of training.
#[derive(Debug, Clone)]
pub struct RankContext {
    sorted_cols: Vec<Vec<f64>>,
}

impl RankContext {
    pub fn fit(rows: &[Vec<f64>]) -> RankContext {
        let n_features = rows.first().map_or(0, |r| r.len());
        let sorted_cols = (0..n_features)
            .map(|f| {
                let mut col: Vec<f64> = rows.iter().map(|r| r[f]).collect();
                col.sort_by(|a, b| a.partial_cmp(b).unwrap());
                col
            })
            .collect();
        RankContext { sorted_cols }
    }

    /// Midrank of `v` within the training column: values below count one,
    /// equal values count half, plus half for the probe itself.
    pub fn midrank(&self, feature: usize, v: f64) -> f64 {
        let col = &self.sorted_cols[feature];
        let below = col.partition_point(|x| *x < v);
        let upto = col.partition_point(|x| *x <= v);
        below as f64 + (upto - below) as f64 / 2.0 + 0.5
    }

    pub fn n_features(&self) -> usize {
        self.sorted_cols.len()
    }
}

/// Auxiliary inputs some distance kinds need.
#[derive(Debug, Clone, Copy)]
pub struct SimAux<'a> {
    /// Minkowski exponent; 3 unless a caller overrides it.
    pub minkowski_p: f64,
    pub ranks: Option<&'a RankContext>,
}

impl Default for SimAux<'_> {
    fn default() -> Self {
        SimAux {
            minkowski_p: 3.0,
            ranks: None,
        }
    }
}

/// Distance between two equal-arity rows. The triangular kernel ranks by
/// plain weighted Euclidean distance here; its down-weighting of far
/// neighbors applies where the selected analogies are combined.
pub fn pair_distance(
    kind: Similarity,
    a: &[f64],
    b: &[f64],
    weights: &[f64],
    aux: &SimAux,
) -> Result<f64> {
    if a.len() != b.len() || a.len() != weights.len() {
        return Err(Error::ArityMismatch {
            expected: a.len(),
            got: b.len().max(weights.len()),
        });
    }
    if weights.iter().any(|w| *w < 0.0) {
        return Err(Error::InvalidArgument("negative feature weight".into()));
    }
    let d = match kind {
        Similarity::WeightedEuclidean | Similarity::TriangularKernel => a
            .iter()
            .zip(b)
            .zip(weights)
            .map(|((x, y), w)| w * (x - y) * (x - y))
            .sum::<f64>()
            .sqrt(),
        Similarity::UnweightedEuclidean => a
            .iter()
            .zip(b)
            .map(|(x, y)| (x - y) * (x - y))
            .sum::<f64>()
            .sqrt(),
        Similarity::MaxDistance => a
            .iter()
            .zip(b)
            .map(|(x, y)| (x - y).abs())
            .fold(0.0, f64::max),
        Similarity::Minkowski => {
            let p = aux.minkowski_p;
            a.iter()
                .zip(b)
                .zip(weights)
                .map(|((x, y), w)| w * (x - y).abs().powf(p))
                .sum::<f64>()
                .powf(1.0 / p)
        }
        Similarity::MeanRank => {
            let ranks = aux.ranks.ok_or_else(|| {
                Error::InvalidArgument("mean-rank distance needs a rank context".into())
            })?;
            if ranks.n_features() != a.len() {
                return Err(Error::ArityMismatch {
                    expected: ranks.n_features(),
                    got: a.len(),
                });
            }
            let total: f64 = (0..a.len())
                .map(|f| (ranks.midrank(f, a[f]) - ranks.midrank(f, b[f])).abs())
                .sum();
            total / a.len() as f64
        }
    };
    Ok(d)
}
