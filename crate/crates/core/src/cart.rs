//! Regression trees and a bagged random-forest baseline.
//!
//! Splits minimize the effort-spread score `sum_i sqrt(v_i) * n_i / n`,
//! where `v_i` is the effort variance of child `i`. Candidate thresholds
//! are midpoints between consecutive sorted unique feature values.

use rand_chacha::ChaCha8Rng;

use crate::dataset::Dataset;
use crate::error::{Error, Result};
use crate::seeding;

/// The four tunable tree parameters. Defaults: use all features, unlimited
/// depth, split nodes above 2 rows, leaves of at least 1 row.
#[derive(Debug, Clone, PartialEq)]
pub struct CartParams {
    /// Fraction of features considered per node, in (0, 1].
    pub max_features: f64,
    /// Depth cap; `None` means unlimited.
    pub max_depth: Option<u32>,
    /// A node is split only when it holds more than this many rows.
    /// 0 and 1 behave identically: a single row can never split.
    pub min_sample_split: u32,
    /// Minimum rows each child of a split must keep.
    pub min_samples_leaf: u32,
}

impl Default for CartParams {
    fn default() -> Self {
        CartParams {
            max_features: 1.0,
            max_depth: None,
            min_sample_split: 2,
            min_samples_leaf: 1,
        }
    }
}

impl CartParams {
    /// Read the four parameters out of a tuning-space candidate.
    pub fn from_candidate(
        space: &crate::configspace::Space,
        candidate: &crate::configspace::Candidate,
    ) -> Result<CartParams> {
        let dim = |name: &str| {
            space
                .dim_index(name)
                .ok_or_else(|| Error::InvalidConfig(format!("space lacks dimension `{name}`")))
        };
        let params = CartParams {
            max_features: candidate.real(dim("max_features")?),
            max_depth: Some(candidate.int(dim("max_depth")?) as u32),
            min_sample_split: candidate.int(dim("min_sample_split")?) as u32,
            min_samples_leaf: candidate.int(dim("min_samples_leaf")?) as u32,
        };
        params.validate()?;
        Ok(params)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.max_features > 0.0 && self.max_features <= 1.0) {
            return Err(Error::InvalidConfig(format!(
                "max_features must be in (0, 1], got {}",
                self.max_features
            )));
        }
        if self.min_samples_leaf < 1 {
            return Err(Error::InvalidConfig(
                "min_samples_leaf must be >= 1".into(),
            ));
        }
        Ok(())
    }
}

#[derive(Debug, Clone)]
enum Node {
    Internal {
        feature: usize,
        threshold: f64,
        rows: Vec<usize>,
        left: Box<Node>,
        right: Box<Node>,
    },
    Leaf {
        value: f64,
        count: usize,
    },
}

/// A fitted regression tree. Immutable and shareable.
#[derive(Debug, Clone)]
pub struct TreeModel {
    root: Node,
    n_features: usize,
}

/// One internal node for inspection: the training rows it saw and the
/// chosen split.
#[derive(Debug, Clone)]
pub struct SplitRecord {
    pub rows: Vec<usize>,
    pub feature: usize,
    pub threshold: f64,
}

struct Builder<'a> {
    rows: &'a [Vec<f64>],
    targets: &'a [f64],
    params: &'a CartParams,
    rng: ChaCha8Rng,
    n_features: usize,
}

struct BestSplit {
    score: f64,
    feature: usize,
    threshold: f64,
}

impl<'a> Builder<'a> {
    fn leaf(&self, idx: &[usize]) -> Node {
        let mean = idx.iter().map(|&i| self.targets[i]).sum::<f64>() / idx.len() as f64;
        Node::Leaf {
            value: mean,
            count: idx.len(),
        }
    }

    fn candidate_features(&mut self) -> Vec<usize> {
        let k = (self.params.max_features * self.n_features as f64).ceil() as usize;
        let k = k.clamp(1, self.n_features);
        if k == self.n_features {
            (0..self.n_features).collect()
        } else {
            let mut picked = seeding::sample_indices(&mut self.rng, self.n_features, k);
            picked.sort_unstable();
            picked
        }
    }

    /// Best (feature, threshold) among the candidates by exhaustive scan of
    /// midpoint thresholds, using prefix sums over the sorted column. Ties
    /// break toward the lowest feature index, then the lowest threshold.
    fn best_split(&self, idx: &[usize], candidates: &[usize]) -> Option<BestSplit> {
        let n = idx.len();
        let msl = self.params.min_samples_leaf as usize;
        let mut best: Option<BestSplit> = None;
        let mut order: Vec<usize> = Vec::with_capacity(n);
        for &feature in candidates {
            order.clear();
            order.extend_from_slice(idx);
            order.sort_by(|&a, &b| {
                self.rows[a][feature]
                    .partial_cmp(&self.rows[b][feature])
                    .expect("finite feature values")
            });
            let mut pref_sum = vec![0.0; n + 1];
            let mut pref_sq = vec![0.0; n + 1];
            for (i, &row) in order.iter().enumerate() {
                let t = self.targets[row];
                pref_sum[i + 1] = pref_sum[i] + t;
                pref_sq[i + 1] = pref_sq[i] + t * t;
            }
            let total = n as f64;
            for i in 1..n {
                let prev = self.rows[order[i - 1]][feature];
                let here = self.rows[order[i]][feature];
                if prev == here {
                    continue;
                }
                if i < msl || n - i < msl {
                    continue;
                }
                let threshold = prev + (here - prev) / 2.0;
                let nl = i as f64;
                let nr = (n - i) as f64;
                let var_l = (pref_sq[i] / nl - (pref_sum[i] / nl).powi(2)).max(0.0);
                let sum_r = pref_sum[n] - pref_sum[i];
                let sq_r = pref_sq[n] - pref_sq[i];
                let var_r = (sq_r / nr - (sum_r / nr).powi(2)).max(0.0);
                let score = var_l.sqrt() * nl / total + var_r.sqrt() * nr / total;
                let better = match &best {
                    None => true,
                    Some(b) => score < b.score,
                };
                if better {
                    best = Some(BestSplit {
                        score,
                        feature,
                        threshold,
                    });
                }
            }
        }
        best
    }

    fn build(&mut self, idx: Vec<usize>, depth: u32) -> Node {
        let n = idx.len();
        if n as u32 <= self.params.min_sample_split.max(1) {
            return self.leaf(&idx);
        }
        if let Some(cap) = self.params.max_depth {
            if depth >= cap {
                return self.leaf(&idx);
            }
        }
        let first = self.targets[idx[0]];
        if idx.iter().all(|&i| self.targets[i] == first) {
            return self.leaf(&idx);
        }
        let candidates = self.candidate_features();
        let split = match self.best_split(&idx, &candidates) {
            Some(s) => s,
            None => return self.leaf(&idx),
        };
        let (left_idx, right_idx): (Vec<usize>, Vec<usize>) = idx
            .iter()
            .partition(|&&i| self.rows[i][split.feature] <= split.threshold);
        let left = self.build(left_idx, depth + 1);
        let right = self.build(right_idx, depth + 1);
        Node::Internal {
            feature: split.feature,
            threshold: split.threshold,
            rows: idx,
            left: Box::new(left),
            right: Box::new(right),
        }
    }
}

impl TreeModel {
    /// Fit on a dataset's features against its efforts.
    pub fn fit(train: &Dataset, params: &CartParams, seed: u64) -> Result<TreeModel> {
        TreeModel::fit_xy(&train.rows, &train.efforts, params, seed)
    }

    /// Fit on raw rows and targets (also used as the tuner surrogate).
    pub fn fit_xy(
        rows: &[Vec<f64>],
        targets: &[f64],
        params: &CartParams,
        seed: u64,
    ) -> Result<TreeModel> {
        params.validate()?;
        if rows.is_empty() {
            return Err(Error::InvalidData("empty training set".into()));
        }
        if rows.len() != targets.len() {
            return Err(Error::ArityMismatch {
                expected: rows.len(),
                got: targets.len(),
            });
        }
        let n_features = rows[0].len();
        if rows.iter().any(|r| r.len() != n_features) {
            return Err(Error::InvalidData("ragged training rows".into()));
        }
        if targets.iter().any(|t| !t.is_finite()) {
            return Err(Error::InvalidData("non-finite training target".into()));
        }
        let mut builder = Builder {
            rows,
            targets,
            params,
            rng: seeding::rng(seed),
            n_features,
        };
        let root = builder.build((0..rows.len()).collect(), 0);
        Ok(TreeModel { root, n_features })
    }

    /// Deterministic descent; values equal to a threshold take the left
    /// (<=) branch.
    pub fn predict(&self, row: &[f64]) -> Result<f64> {
        if row.len() != self.n_features {
            return Err(Error::ArityMismatch {
                expected: self.n_features,
                got: row.len(),
            });
        }
        let mut node = &self.root;
        loop {
            match node {
                Node::Leaf { value, .. } => return Ok(*value),
                Node::Internal {
                    feature,
                    threshold,
                    left,
                    right,
                    ..
                } => {
                    node = if row[*feature] <= *threshold { left } else { right };
                }
            }
        }
    }

    pub fn node_count(&self) -> usize {
        fn walk(n: &Node) -> usize {
            match n {
                Node::Leaf { .. } => 1,
                Node::Internal { left, right, .. } => 1 + walk(left) + walk(right),
            }
        }
        walk(&self.root)
    }

    pub fn depth(&self) -> u32 {
        fn walk(n: &Node) -> u32 {
            match n {
                Node::Leaf { .. } => 0,
                Node::Internal { left, right, .. } => 1 + walk(left).max(walk(right)),
            }
        }
        walk(&self.root)
    }

    /// Every internal node with the training rows it partitioned.
    pub fn splits(&self) -> Vec<SplitRecord> {
        let mut out = Vec::new();
        fn walk(n: &Node, out: &mut Vec<SplitRecord>) {
            if let Node::Internal {
                feature,
                threshold,
                rows,
                left,
                right,
            } = n
            {
                out.push(SplitRecord {
                    rows: rows.clone(),
                    feature: *feature,
                    threshold: *threshold,
                });
                walk(left, out);
                walk(right, out);
            }
        }
        walk(&self.root, &mut out);
        out
    }

    /// Leaf (mean, row count) pairs in depth-first order.
    pub fn leaves(&self) -> Vec<(f64, usize)> {
        let mut out = Vec::new();
        fn walk(n: &Node, out: &mut Vec<(f64, usize)>) {
            match n {
                Node::Leaf { value, count } => out.push((*value, *count)),
                Node::Internal { left, right, .. } => {
                    walk(left, out);
                    walk(right, out);
                }
            }
        }
        walk(&self.root, &mut out);
        out
    }

    /// Indented plain-text dump: feature name, threshold, leaf mean, count.
    pub fn dump_text(&self, feature_names: &[String]) -> String {
        let mut out = String::new();
        fn walk(n: &Node, names: &[String], indent: usize, out: &mut String) {
            let pad = "  ".repeat(indent);
            match n {
                Node::Leaf { value, count } => {
                    out.push_str(&format!("{pad}leaf mean={value:.4} n={count}\n"));
                }
                Node::Internal {
                    feature,
                    threshold,
                    left,
                    right,
                    ..
                } => {
                    let name = names
                        .get(*feature)
                        .map(|s| s.as_str())
                        .unwrap_or("feature");
                    out.push_str(&format!("{pad}{name} <= {threshold:.4}\n"));
                    walk(left, names, indent + 1, out);
                    out.push_str(&format!("{pad}{name} > {threshold:.4}\n"));
                    walk(right, names, indent + 1, out);
                }
            }
        }
        walk(&self.root, feature_names, 0, &mut out);
        out
    }
}

/// Bagged ensemble of trees with per-node feature subsampling of
/// ceil(sqrt(features)).
#[derive(Debug, Clone)]
pub struct RandomForest {
    trees: Vec<TreeModel>,
}

impl RandomForest {
    pub fn fit(train: &Dataset, n_trees: usize, seed: u64) -> Result<RandomForest> {
        let f = train.n_features() as f64;
        RandomForest::fit_with(train, n_trees, seed, true, f.sqrt() / f)
    }

    /// Diagnostic entry point: `bootstrap = false` trains every tree on the
    /// full sample, which with one tree and `max_features = 1.0` reduces to
    /// a plain default-parameter tree.
    pub fn fit_with(
        train: &Dataset,
        n_trees: usize,
        seed: u64,
        bootstrap: bool,
        max_features: f64,
    ) -> Result<RandomForest> {
        if n_trees < 1 {
            return Err(Error::InvalidArgument("n_trees must be >= 1".into()));
        }
        if train.n_rows() == 0 {
            return Err(Error::InvalidData("empty training set".into()));
        }
        let params = CartParams {
            max_features,
            ..CartParams::default()
        };
        let mut trees = Vec::with_capacity(n_trees);
        for t in 0..n_trees {
            let tree_seed = seeding::seed_for(seed, &["rf-tree", &t.to_string()]);
            let sample = if bootstrap {
                let mut rng = seeding::rng(seeding::seed_for(seed, &["rf-bootstrap", &t.to_string()]));
                let n = train.n_rows();
                let idx: Vec<usize> = (0..n)
                    .map(|_| seeding::rand_below(&mut rng, n as u64) as usize)
                    .collect();
                train.subset(&idx)
            } else {
                train.clone()
            };
            trees.push(TreeModel::fit(&sample, &params, tree_seed)?);
        }
        Ok(RandomForest { trees })
    }

    /// Arithmetic mean of the individual tree predictions.
    pub fn predict(&self, row: &[f64]) -> Result<f64> {
        let mut sum = 0.0;
        for t in &self.trees {
            sum += t.predict(row)?;
        }
        Ok(sum / self.trees.len() as f64)
    }

    pub fn tree_predictions(&self, row: &[f64]) -> Result<Vec<f64>> {
        self.trees.iter().map(|t| t.predict(row)).collect()
    }
}
