//! Dataset loading, cleaning, normalization, and cross-validation folds.

use std::fs::File;
use std::io::Read;
use std::path::Path;

use crate::error::{Error, Result};
use crate::seeding;

/// Integer coding for a categorical column: code `i` stands for `levels[i]`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Codebook {
    pub levels: Vec<String>,
}

impl Codebook {
    pub fn code_of(&self, level: &str) -> Option<f64> {
        self.levels.iter().position(|l| l == level).map(|i| i as f64)
    }
}

/// A named numeric feature matrix plus one positive effort column.
///
/// Immutable after construction; cheap to share read-only across workers.
#[derive(Debug, Clone, PartialEq)]
pub struct Dataset {
    pub name: String,
    pub feature_names: Vec<String>,
    pub rows: Vec<Vec<f64>>,
    pub efforts: Vec<f64>,
    /// Per-feature codebook when the column held text in the source CSV.
    pub codebooks: Vec<Option<Codebook>>,
}

impl Dataset {
    pub fn new(
        name: impl Into<String>,
        feature_names: Vec<String>,
        rows: Vec<Vec<f64>>,
        efforts: Vec<f64>,
    ) -> Result<Self> {
        let n_features = feature_names.len();
        let codebooks = vec![None; n_features];
        let d = Dataset {
            name: name.into(),
            feature_names,
            rows,
            efforts,
            codebooks,
        };
        d.validate()?;
        Ok(d)
    }

    fn validate(&self) -> Result<()> {
        if self.rows.is_empty() {
            return Err(Error::InvalidData(format!("{}: zero rows", self.name)));
        }
        if self.rows.len() != self.efforts.len() {
            return Err(Error::InvalidData(format!(
                "{}: {} rows but {} efforts",
                self.name,
                self.rows.len(),
                self.efforts.len()
            )));
        }
        for (i, row) in self.rows.iter().enumerate() {
            if row.len() != self.feature_names.len() {
                return Err(Error::InvalidData(format!(
                    "{}: row {} has {} cells, expected {}",
                    self.name,
                    i,
                    row.len(),
                    self.feature_names.len()
                )));
            }
            if row.iter().any(|v| !v.is_finite()) {
                return Err(Error::InvalidData(format!(
                    "{}: non-finite feature value in row {}",
                    self.name, i
                )));
            }
        }
        for (i, e) in self.efforts.iter().enumerate() {
            if !e.is_finite() || *e < 0.0 {
                return Err(Error::InvalidData(format!(
                    "{}: effort {} in row {} is not a non-negative finite number",
                    self.name, e, i
                )));
            }
        }
        let mut names = self.feature_names.clone();
        names.sort();
        names.dedup();
        if names.len() != self.feature_names.len() {
            return Err(Error::InvalidData(format!(
                "{}: duplicate feature names",
                self.name
            )));
        }
        Ok(())
    }

    pub fn n_rows(&self) -> usize {
        self.rows.len()
    }

    pub fn n_features(&self) -> usize {
        self.feature_names.len()
    }

    /// Load a dataset from CSV. The effort column is the one named by
    /// `effort_column`, else a column named "effort" (case-insensitive),
    /// else the last column.
    pub fn from_csv_path(path: impl AsRef<Path>, effort_column: Option<&str>) -> Result<Self> {
        let path = path.as_ref();
        let name = path
            .file_stem()
            .map(|s| s.to_string_lossy().into_owned())
            .unwrap_or_else(|| "dataset".into());
        let mut text = String::new();
        File::open(path)?.read_to_string(&mut text)?;
        Self::from_csv_str(&name, &text, effort_column)
    }

    /// Parse CSV text: UTF-8, comma-separated, header row, one project per
    /// row. Columns where every cell parses as a number stay numeric; any
    /// other column is integer-coded with a codebook in order of first
    /// appearance. Empty cells are rejected (no imputation).
    pub fn from_csv_str(name: &str, text: &str, effort_column: Option<&str>) -> Result<Self> {
        let mut reader = csv::ReaderBuilder::new()
            .has_headers(true)
            .trim(csv::Trim::All)
            .from_reader(text.as_bytes());
        let headers: Vec<String> = reader
            .headers()?
            .iter()
            .map(|h| h.trim().to_string())
            .collect();
        if headers.is_empty() || headers.iter().all(|h| h.is_empty()) {
            return Err(Error::InvalidData(format!("{name}: zero rows")));
        }
        {
            let mut sorted = headers.clone();
            sorted.sort();
            sorted.dedup();
            if sorted.len() != headers.len() {
                return Err(Error::InvalidData(format!(
                    "{name}: duplicate header names"
                )));
            }
        }
        let mut cells: Vec<Vec<String>> = Vec::new();
        for record in reader.records() {
            let record = record?;
            if record.len() != headers.len() {
                return Err(Error::InvalidData(format!(
                    "{name}: ragged row with {} cells, expected {}",
                    record.len(),
                    headers.len()
                )));
            }
            cells.push(record.iter().map(|c| c.trim().to_string()).collect());
        }
        if cells.is_empty() {
            return Err(Error::InvalidData(format!("{name}: zero rows")));
        }
        for (i, row) in cells.iter().enumerate() {
            if row.iter().any(|c| c.is_empty()) {
                return Err(Error::InvalidData(format!(
                    "{name}: missing value in data row {i}"
                )));
            }
        }

        let effort_idx = match effort_column {
            Some(wanted) => headers
                .iter()
                .position(|h| h.eq_ignore_ascii_case(wanted))
                .ok_or_else(|| Error::UnknownFeature(wanted.to_string()))?,
            None => headers
                .iter()
                .position(|h| h.eq_ignore_ascii_case("effort"))
                .unwrap_or(headers.len() - 1),
        };

        let mut efforts = Vec::with_capacity(cells.len());
        for (i, row) in cells.iter().enumerate() {
            let raw = &row[effort_idx];
            let v: f64 = raw.parse().map_err(|_| {
                Error::InvalidData(format!(
                    "{name}: effort cell `{raw}` in row {i} is not numeric"
                ))
            })?;
            efforts.push(v);
        }

        let mut feature_names = Vec::new();
        let mut columns: Vec<Vec<f64>> = Vec::new();
        let mut codebooks: Vec<Option<Codebook>> = Vec::new();
        for (c, header) in headers.iter().enumerate() {
            if c == effort_idx {
                continue;
            }
            let raw: Vec<&str> = cells.iter().map(|r| r[c].as_str()).collect();
            let parsed: Option<Vec<f64>> = raw
                .iter()
                .map(|s| s.parse::<f64>().ok().filter(|v| v.is_finite()))
                .collect();
            match parsed {
                Some(vals) => {
                    columns.push(vals);
                    codebooks.push(None);
                }
                None => {
                    let mut levels: Vec<String> = Vec::new();
                    let mut coded = Vec::with_capacity(raw.len());
                    for s in &raw {
                        let code = match levels.iter().position(|l| l == s) {
                            Some(i) => i,
                            None => {
                                levels.push(s.to_string());
                                levels.len() - 1
                            }
                        };
                        coded.push(code as f64);
                    }
                    columns.push(coded);
                    codebooks.push(Some(Codebook { levels }));
                }
            }
            feature_names.push(header.clone());
        }

        let n = cells.len();
        let rows: Vec<Vec<f64>> = (0..n)
            .map(|i| columns.iter().map(|col| col[i]).collect())
            .collect();
        let d = Dataset {
            name: name.to_string(),
            feature_names,
            rows,
            efforts,
            codebooks,
        };
        d.validate()?;
        Ok(d)
    }

    /// Return a copy without the named features. Row count is unchanged.
    pub fn drop_features(&self, drop: &[String]) -> Result<Dataset> {
        for name in drop {
            if !self.feature_names.iter().any(|f| f == name) {
                return Err(Error::UnknownFeature(name.clone()));
            }
        }
        let keep: Vec<usize> = (0..self.n_features())
            .filter(|&i| !drop.contains(&self.feature_names[i]))
            .collect();
        Ok(Dataset {
            name: self.name.clone(),
            feature_names: keep.iter().map(|&i| self.feature_names[i].clone()).collect(),
            rows: self
                .rows
                .iter()
                .map(|r| keep.iter().map(|&i| r[i]).collect())
                .collect(),
            efforts: self.efforts.clone(),
            codebooks: keep.iter().map(|&i| self.codebooks[i].clone()).collect(),
        })
    }

    /// Row subset by index, preserving order of `idx`.
    pub fn subset(&self, idx: &[usize]) -> Dataset {
        Dataset {
            name: self.name.clone(),
            feature_names: self.feature_names.clone(),
            rows: idx.iter().map(|&i| self.rows[i].clone()).collect(),
            efforts: idx.iter().map(|&i| self.efforts[i]).collect(),
            codebooks: self.codebooks.clone(),
        }
    }

    /// True for features that were text-coded at load.
    pub fn categorical_mask(&self) -> Vec<bool> {
        self.codebooks.iter().map(|c| c.is_some()).collect()
    }
}

/// Load a cleaning manifest: one dropped column name per line, `#` comments.
pub fn load_drop_manifest(path: impl AsRef<Path>) -> Result<Vec<String>> {
    let mut text = String::new();
    File::open(path)?.read_to_string(&mut text)?;
    Ok(parse_drop_manifest(&text))
}

pub fn parse_drop_manifest(text: &str) -> Vec<String> {
    text.lines()
        .map(|l| l.trim())
        .filter(|l| !l.is_empty() && !l.starts_with('#'))
        .map(|l| l.to_string())
        .collect()
}

/// Per-feature min/max captured from a training set. Applying it to test
/// rows uses the training statistics; values outside the training range are
/// clamped to [0, 1] and constant columns map to zero.
#[derive(Debug, Clone, PartialEq)]
pub struct Normalizer {
    pub mins: Vec<f64>,
    pub maxs: Vec<f64>,
}

impl Normalizer {
    pub fn fit(d: &Dataset) -> Normalizer {
        let f = d.n_features();
        let mut mins = vec![f64::INFINITY; f];
        let mut maxs = vec![f64::NEG_INFINITY; f];
        for row in &d.rows {
            for (i, v) in row.iter().enumerate() {
                mins[i] = mins[i].min(*v);
                maxs[i] = maxs[i].max(*v);
            }
        }
        Normalizer { mins, maxs }
    }

    pub fn transform_row(&self, row: &[f64]) -> Result<Vec<f64>> {
        if row.len() != self.mins.len() {
            return Err(Error::ArityMismatch {
                expected: self.mins.len(),
                got: row.len(),
            });
        }
        Ok(row
            .iter()
            .enumerate()
            .map(|(i, v)| {
                let span = self.maxs[i] - self.mins[i];
                if span <= 0.0 {
                    0.0
                } else {
                    ((v - self.mins[i]) / span).clamp(0.0, 1.0)
                }
            })
            .collect())
    }

    /// Map a normalized row back to feature units. Constant columns recover
    /// their single training value.
    pub fn inverse_row(&self, row: &[f64]) -> Result<Vec<f64>> {
        if row.len() != self.mins.len() {
            return Err(Error::ArityMismatch {
                expected: self.mins.len(),
                got: row.len(),
            });
        }
        Ok(row
            .iter()
            .enumerate()
            .map(|(i, v)| {
                let span = self.maxs[i] - self.mins[i];
                if span <= 0.0 {
                    self.mins[i]
                } else {
                    self.mins[i] + v * span
                }
            })
            .collect())
    }

    pub fn transform_dataset(&self, d: &Dataset) -> Result<Dataset> {
        let rows = d
            .rows
            .iter()
            .map(|r| self.transform_row(r))
            .collect::<Result<Vec<_>>>()?;
        Ok(Dataset {
            name: d.name.clone(),
            feature_names: d.feature_names.clone(),
            rows,
            efforts: d.efforts.clone(),
            codebooks: d.codebooks.clone(),
        })
    }
}

/// Min-max normalize every feature column to [0, 1]; efforts untouched.
pub fn normalize_minmax(d: &Dataset) -> (Dataset, Normalizer) {
    let norm = Normalizer::fit(d);
    let out = norm.transform_dataset(d).expect("arity is consistent");
    (out, norm)
}

/// One shuffled partition of row indices into bins.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FoldPlan {
    pub repeat_index: usize,
    pub seed: u64,
    pub bin_of_row: Vec<usize>,
}

impl FoldPlan {
    pub fn n_bins(&self) -> usize {
        self.bin_of_row.iter().max().map_or(0, |m| m + 1)
    }

    pub fn test_indices(&self, bin: usize) -> Vec<usize> {
        (0..self.bin_of_row.len())
            .filter(|&i| self.bin_of_row[i] == bin)
            .collect()
    }

    pub fn train_indices(&self, bin: usize) -> Vec<usize> {
        (0..self.bin_of_row.len())
            .filter(|&i| self.bin_of_row[i] != bin)
            .collect()
    }
}

/// Build `repeats` shuffled plans of `bins` bins each. Identical arguments
/// produce identical plans; bin sizes differ by at most one.
pub fn make_folds(d: &Dataset, repeats: usize, bins: usize, seed: u64) -> Result<Vec<FoldPlan>> {
    if repeats < 1 {
        return Err(Error::InvalidArgument("repeats must be >= 1".into()));
    }
    if bins < 2 || bins > d.n_rows() {
        return Err(Error::InvalidArgument(format!(
            "bins must be in [2, {}], got {bins}",
            d.n_rows()
        )));
    }
    let mut plans = Vec::with_capacity(repeats);
    for repeat in 0..repeats {
        let plan_seed = seeding::seed_for(seed, &["fold-plan", &repeat.to_string()]);
        let mut order: Vec<usize> = (0..d.n_rows()).collect();
        seeding::shuffle(&mut seeding::rng(plan_seed), &mut order);
        let mut bin_of_row = vec![0usize; d.n_rows()];
        for (pos, &row) in order.iter().enumerate() {
            bin_of_row[row] = pos % bins;
        }
        plans.push(FoldPlan {
            repeat_index: repeat,
            seed: plan_seed,
            bin_of_row,
        });
    }
    Ok(plans)
}
