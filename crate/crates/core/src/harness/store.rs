//! Append-only experiment results plus their on-disk layout: a JSON
//! manifest, a scores CSV, fold-partition hashes, and optional optimizer
//! trace CSVs.

use std::fs;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::Result;
use crate::harness::ExperimentPlan;
use crate::metrics::FoldScore;
use crate::optimizers::TraceRow;
use crate::stats::TreatmentSamples;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StoreManifest {
    pub plan: ExperimentPlan,
    pub version: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CellFailure {
    pub treatment: String,
    pub dataset: String,
    pub repeat: usize,
    pub fold: usize,
    pub message: String,
}

/// Optimizer audit trail for one tuned cell.
#[derive(Debug, Clone, PartialEq)]
pub struct CellTrace {
    pub treatment: String,
    pub dataset: String,
    pub repeat: usize,
    pub fold: usize,
    pub rows: Vec<TraceRow>,
}

/// FNV hash of the sorted training indices of one fold; equal hashes
/// across treatments certify that they saw the same partition.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FoldHash {
    pub dataset: String,
    pub repeat: usize,
    pub fold: usize,
    pub train_hash: u64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ResultStore {
    pub manifest: StoreManifest,
    pub records: Vec<FoldScore>,
    pub failures: Vec<CellFailure>,
    pub traces: Vec<CellTrace>,
    pub fold_hashes: Vec<FoldHash>,
}

impl ResultStore {
    /// Write manifest.json, scores.csv, fold_hashes.csv, failures.csv
    /// (when any), and one trace CSV per tuned cell (when collected).
    pub fn save(&self, dir: &Path) -> Result<()> {
        fs::create_dir_all(dir)?;
        fs::write(
            dir.join("manifest.json"),
            serde_json::to_string_pretty(&self.manifest)?,
        )?;

        let mut w = csv::Writer::from_path(dir.join("scores.csv"))?;
        for r in &self.records {
            w.serialize(r)?;
        }
        w.flush()?;

        let mut w = csv::Writer::from_path(dir.join("fold_hashes.csv"))?;
        for h in &self.fold_hashes {
            w.serialize(h)?;
        }
        w.flush()?;

        if !self.failures.is_empty() {
            let mut w = csv::Writer::from_path(dir.join("failures.csv"))?;
            for f in &self.failures {
                w.serialize(f)?;
            }
            w.flush()?;
        }

        if !self.traces.is_empty() {
            let trace_dir = dir.join("traces");
            fs::create_dir_all(&trace_dir)?;
            for t in &self.traces {
                let name = format!(
                    "{}_{}_r{}_f{}.csv",
                    t.dataset, t.treatment, t.repeat, t.fold
                );
                let mut w = csv::Writer::from_path(trace_dir.join(name))?;
                w.write_record(["index", "candidate", "score"])?;
                for row in &t.rows {
                    w.write_record([
                        row.index.to_string(),
                        row.token.clone(),
                        format!("{:.9}", row.score),
                    ])?;
                }
                w.flush()?;
            }
        }
        Ok(())
    }

    /// Reload a saved store. Trace CSVs are audit artifacts and are not
    /// read back.
    pub fn load(dir: &Path) -> Result<ResultStore> {
        let manifest: StoreManifest =
            serde_json::from_str(&fs::read_to_string(dir.join("manifest.json"))?)?;
        let mut records = Vec::new();
        let mut reader = csv::Reader::from_path(dir.join("scores.csv"))?;
        for row in reader.deserialize() {
            records.push(row?);
        }
        let mut fold_hashes = Vec::new();
        let hashes_path = dir.join("fold_hashes.csv");
        if hashes_path.exists() {
            let mut reader = csv::Reader::from_path(hashes_path)?;
            for row in reader.deserialize() {
                fold_hashes.push(row?);
            }
        }
        let mut failures = Vec::new();
        let failures_path = dir.join("failures.csv");
        if failures_path.exists() {
            let mut reader = csv::Reader::from_path(failures_path)?;
            for row in reader.deserialize() {
                failures.push(row?);
            }
        }
        Ok(ResultStore {
            manifest,
            records,
            failures,
            traces: Vec::new(),
            fold_hashes,
        })
    }

    pub fn datasets(&self) -> Vec<String> {
        self.manifest.plan.datasets.clone()
    }

    /// Per-treatment score distributions for one dataset and metric, in
    /// plan order, with runtimes summed over the dataset's cells.
    pub fn samples_for(&self, dataset: &str, metric: super::Metric) -> Vec<TreatmentSamples> {
        let mut out = Vec::new();
        for treatment in &self.manifest.plan.treatments {
            let token = treatment.token();
            let cells: Vec<&FoldScore> = self
                .records
                .iter()
                .filter(|r| r.dataset == dataset && r.treatment == token)
                .collect();
            if cells.is_empty() {
                continue;
            }
            let scores: Vec<f64> = cells
                .iter()
                .map(|r| match metric {
                    super::Metric::Mre => r.mdmre,
                    super::Metric::Sa => r.sa,
                })
                .collect();
            let runtime = cells.iter().map(|r| r.seconds).sum();
            out.push(TreatmentSamples::new(token, scores, runtime));
        }
        out
    }
}

impl ResultStore {
    /// Records for one cell, used by reproducibility audits.
    pub fn cell_records(&self, dataset: &str, treatment: &str, repeat: usize, fold: usize) -> Vec<&FoldScore> {
        self.records
            .iter()
            .filter(|r| {
                r.dataset == dataset && r.treatment == treatment && r.repeat == repeat && r.fold == fold
            })
            .collect()
    }
}

impl std::fmt::Display for CellFailure {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(
            f,
            "{}/{} repeat {} fold {}: {}",
            self.dataset, self.treatment, self.repeat, self.fold, self.message
        )
    }
}
