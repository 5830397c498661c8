//! Experiment orchestration: run treatments over datasets with M*N
//! cross-validation, record per-fold scores and runtimes, and hand the
//! results to the ranking reports.
//!
//! All treatments inside one (dataset, repeat, fold) cell share the same
//! train/test partition: folds are derived from (master seed, dataset,
//! repeat) only. Every stochastic component inside a cell re-seeds from
//! (master seed, dataset, treatment, repeat, fold), so cells reproduce
//! bit-identically no matter how the work-stealing pool schedules them.

use std::fmt;
use std::path::Path;
use std::time::Instant;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::abe::{AbeConfig, AbeModel};
use crate::baselines::{random_guess_mae, AtlmModel, Lp4eeModel};
use crate::cart::{CartParams, RandomForest, TreeModel};
use crate::configspace::{aben_space, cart_space, Candidate, Space};
use crate::dataset::{load_drop_manifest, make_folds, Dataset, FoldPlan};
use crate::error::{Error, Result};
use crate::metrics::{mae, median_mre, sa, FoldScore};
use crate::optimizers::{
    de_optimize, flash_optimize, random_search, DeParams, FlashParams, Objective, TraceRow,
    DEFAULT_EVALS,
};
use crate::seeding::{self, seed_for};

pub mod report;
pub mod store;

pub use report::{render_report, summarize_wins, Metric, Report, WinTable};
pub use store::{CellFailure, CellTrace, FoldHash, ResultStore, StoreManifest};

/// Trees in the untuned random-forest baseline.
pub const RF_TREES: usize = 100;
/// Random-guess runs behind each fold's standardized-accuracy baseline.
pub const GUESS_RUNS: usize = 1000;

/// One (learner, optimizer) pairing.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Treatment {
    Abe0,
    AbenRd,
    AbenDe,
    Cart,
    CartRd,
    CartDe,
    CartFlash,
    Rf,
    Atlm,
    Lp4ee,
}

impl Treatment {
    pub const ALL: [Treatment; 10] = [
        Treatment::Abe0,
        Treatment::AbenRd,
        Treatment::AbenDe,
        Treatment::Cart,
        Treatment::CartRd,
        Treatment::CartDe,
        Treatment::CartFlash,
        Treatment::Rf,
        Treatment::Atlm,
        Treatment::Lp4ee,
    ];

    pub fn token(self) -> &'static str {
        match self {
            Treatment::Abe0 => "ABE0",
            Treatment::AbenRd => "ABEN_RD",
            Treatment::AbenDe => "ABEN_DE",
            Treatment::Cart => "CART",
            Treatment::CartRd => "CART_RD",
            Treatment::CartDe => "CART_DE",
            Treatment::CartFlash => "CART_FLASH",
            Treatment::Rf => "RF",
            Treatment::Atlm => "ATLM",
            Treatment::Lp4ee => "LP4EE",
        }
    }

    pub fn parse(s: &str) -> Result<Treatment> {
        Treatment::ALL
            .into_iter()
            .find(|t| t.token().eq_ignore_ascii_case(s))
            .ok_or_else(|| Error::InvalidArgument(format!("unknown treatment `{s}`")))
    }

    /// Treatments that spend an optimizer budget before fitting.
    pub fn is_tuned(self) -> bool {
        matches!(
            self,
            Treatment::AbenRd
                | Treatment::AbenDe
                | Treatment::CartRd
                | Treatment::CartDe
                | Treatment::CartFlash
        )
    }
}

impl fmt::Display for Treatment {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.token())
    }
}

/// What to run: datasets by name, treatments, M repeats of N bins, and the
/// master seed everything derives from.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExperimentPlan {
    pub datasets: Vec<String>,
    pub treatments: Vec<Treatment>,
    pub repeats: usize,
    pub bins: usize,
    pub master_seed: u64,
    #[serde(default)]
    pub collect_traces: bool,
}

impl ExperimentPlan {
    pub fn validate(&self) -> Result<()> {
        if self.datasets.is_empty() {
            return Err(Error::InvalidArgument("plan has no datasets".into()));
        }
        if self.treatments.is_empty() {
            return Err(Error::InvalidArgument("plan has no treatments".into()));
        }
        if self.repeats < 1 {
            return Err(Error::InvalidArgument("repeats must be >= 1".into()));
        }
        if self.bins < 2 {
            return Err(Error::InvalidArgument("bins must be >= 2".into()));
        }
        Ok(())
    }
}

/// Load `<data_dir>/<name>.csv` and apply `<data_dir>/manifests/<name>.drop`
/// when that cleaning manifest exists.
pub fn load_cleaned_dataset(data_dir: &Path, name: &str) -> Result<Dataset> {
    let csv_path = data_dir.join(format!("{name}.csv"));
    let d = Dataset::from_csv_path(&csv_path, None)?;
    let manifest = data_dir.join("manifests").join(format!("{name}.drop"));
    if manifest.exists() {
        let drop = load_drop_manifest(&manifest)?;
        d.drop_features(&drop)
    } else {
        Ok(d)
    }
}

struct Cell<'a> {
    dataset: &'a Dataset,
    folds: &'a [FoldPlan],
    treatment: Treatment,
    repeat: usize,
    fold: usize,
}

/// Run the whole plan. Per-fold failures become recorded [`CellFailure`]s
/// rather than aborting the experiment.
pub fn run_experiment(plan: &ExperimentPlan, data_dir: &Path) -> Result<ResultStore> {
    plan.validate()?;
    let datasets: Vec<Dataset> = plan
        .datasets
        .iter()
        .map(|name| load_cleaned_dataset(data_dir, name))
        .collect::<Result<_>>()?;
    let fold_plans: Vec<Vec<FoldPlan>> = datasets
        .iter()
        .map(|d| {
            let fold_seed = seed_for(plan.master_seed, &[&d.name, "folds"]);
            make_folds(d, plan.repeats, plan.bins, fold_seed)
        })
        .collect::<Result<_>>()?;

    let mut fold_hashes = Vec::new();
    for (d, plans) in datasets.iter().zip(&fold_plans) {
        for p in plans {
            for bin in 0..plan.bins {
                fold_hashes.push(FoldHash {
                    dataset: d.name.clone(),
                    repeat: p.repeat_index,
                    fold: bin,
                    train_hash: hash_indices(&p.train_indices(bin)),
                });
            }
        }
    }

    let mut cells = Vec::new();
    for (di, d) in datasets.iter().enumerate() {
        for &treatment in &plan.treatments {
            for repeat in 0..plan.repeats {
                for fold in 0..plan.bins {
                    cells.push(Cell {
                        dataset: d,
                        folds: &fold_plans[di],
                        treatment,
                        repeat,
                        fold,
                    });
                }
            }
        }
    }

    let outcomes: Vec<std::result::Result<(FoldScore, Option<CellTrace>), CellFailure>> = cells
        .par_iter()
        .map(|cell| run_cell(cell, plan))
        .collect();

    let mut records = Vec::new();
    let mut failures = Vec::new();
    let mut traces = Vec::new();
    for outcome in outcomes {
        match outcome {
            Ok((score, trace)) => {
                records.push(score);
                if let Some(t) = trace {
                    traces.push(t);
                }
            }
            Err(failure) => failures.push(failure),
        }
    }
    records.sort_by(|a, b| {
        (&a.dataset, &a.treatment, a.repeat, a.fold)
            .cmp(&(&b.dataset, &b.treatment, b.repeat, b.fold))
    });

    Ok(ResultStore {
        manifest: StoreManifest {
            plan: plan.clone(),
            version: env!("CARGO_PKG_VERSION").to_string(),
        },
        records,
        failures,
        traces,
        fold_hashes,
    })
}

/// Run a single (dataset, treatment, repeat, fold) cell against an
/// existing fold plan. Exposed so reproducibility checks can re-run one
/// cell in isolation.
pub fn run_single_cell(
    dataset: &Dataset,
    folds: &[FoldPlan],
    treatment: Treatment,
    repeat: usize,
    fold: usize,
    plan: &ExperimentPlan,
) -> std::result::Result<(FoldScore, Option<CellTrace>), CellFailure> {
    run_cell(
        &Cell {
            dataset,
            folds,
            treatment,
            repeat,
            fold,
        },
        plan,
    )
}

fn hash_indices(idx: &[usize]) -> u64 {
    let bytes: Vec<u8> = idx.iter().flat_map(|i| (*i as u64).to_le_bytes()).collect();
    seeding::fnv1a64(&[&bytes])
}

fn run_cell(
    cell: &Cell,
    plan: &ExperimentPlan,
) -> std::result::Result<(FoldScore, Option<CellTrace>), CellFailure> {
    let fail = |message: String| CellFailure {
        treatment: cell.treatment.token().to_string(),
        dataset: cell.dataset.name.clone(),
        repeat: cell.repeat,
        fold: cell.fold,
        message,
    };
    let started = Instant::now();
    let fold_plan = &cell.folds[cell.repeat];
    let train_idx = fold_plan.train_indices(cell.fold);
    let test_idx = fold_plan.test_indices(cell.fold);
    if train_idx.is_empty() || test_idx.is_empty() {
        return Err(fail("empty train or test partition".into()));
    }
    let train = cell.dataset.subset(&train_idx);
    let test_rows: Vec<&[f64]> = test_idx
        .iter()
        .map(|&i| cell.dataset.rows[i].as_slice())
        .collect();
    let test_actuals: Vec<f64> = test_idx.iter().map(|&i| cell.dataset.efforts[i]).collect();

    let cell_seed = seed_for(
        plan.master_seed,
        &[
            &cell.dataset.name,
            cell.treatment.token(),
            &cell.repeat.to_string(),
            &cell.fold.to_string(),
        ],
    );

    let (predictions, trace) =
        match predict_treatment(cell.treatment, &train, &test_rows, cell_seed, plan.collect_traces)
        {
            Ok(v) => v,
            Err(e) => return Err(fail(e.to_string())),
        };

    let mdmre = match median_mre(&test_actuals, &predictions) {
        Some(v) => v * 100.0,
        None => return Err(fail("no test row has positive actual effort".into())),
    };
    let mae_model = match mae(&test_actuals, &predictions) {
        Ok(v) => v,
        Err(e) => return Err(fail(e.to_string())),
    };
    let guess_seed = seed_for(cell_seed, &["guess"]);
    let mae_guess =
        match random_guess_mae(&train.efforts, &test_actuals, GUESS_RUNS, guess_seed) {
            Ok(v) => v,
            Err(e) => return Err(fail(e.to_string())),
        };
    let sa_pct = match sa(mae_model, mae_guess) {
        Ok(v) => v,
        Err(e) => return Err(fail(e.to_string())),
    };

    let score = FoldScore {
        treatment: cell.treatment.token().to_string(),
        dataset: cell.dataset.name.clone(),
        repeat: cell.repeat,
        fold: cell.fold,
        mdmre,
        sa: sa_pct,
        seconds: started.elapsed().as_secs_f64(),
    };
    let trace = trace.map(|rows| CellTrace {
        treatment: cell.treatment.token().to_string(),
        dataset: cell.dataset.name.clone(),
        repeat: cell.repeat,
        fold: cell.fold,
        rows,
    });
    Ok((score, trace))
}

type Predictions = (Vec<f64>, Option<Vec<TraceRow>>);

fn predict_treatment(
    treatment: Treatment,
    train: &Dataset,
    test_rows: &[&[f64]],
    seed: u64,
    collect_trace: bool,
) -> Result<Predictions> {
    match treatment {
        Treatment::Abe0 => {
            let model = AbeModel::fit(train, &AbeConfig::abe0(), seed)?;
            let preds = test_rows
                .iter()
                .map(|row| model.predict(row))
                .collect::<Result<_>>()?;
            Ok((preds, None))
        }
        Treatment::Cart => {
            let model = TreeModel::fit(train, &CartParams::default(), seed)?;
            let preds = test_rows
                .iter()
                .map(|row| model.predict(row))
                .collect::<Result<_>>()?;
            Ok((preds, None))
        }
        Treatment::Rf => {
            let model = RandomForest::fit(train, RF_TREES, seed)?;
            let preds = test_rows
                .iter()
                .map(|row| model.predict(row))
                .collect::<Result<_>>()?;
            Ok((preds, None))
        }
        Treatment::Atlm => {
            let model = AtlmModel::fit(train, &train.categorical_mask())?;
            let preds = test_rows
                .iter()
                .map(|row| model.predict(row))
                .collect::<Result<_>>()?;
            Ok((preds, None))
        }
        Treatment::Lp4ee => {
            let model = Lp4eeModel::fit(train)?;
            let preds = test_rows
                .iter()
                .map(|row| model.predict(row))
                .collect::<Result<_>>()?;
            Ok((preds, None))
        }
        Treatment::CartRd | Treatment::CartDe | Treatment::CartFlash => {
            tune_and_predict(treatment, &cart_space(), train, test_rows, seed, collect_trace)
        }
        Treatment::AbenRd | Treatment::AbenDe => {
            tune_and_predict(treatment, &aben_space(), train, test_rows, seed, collect_trace)
        }
    }
}

/// Inner build/validate split (2:1, seeded once per fold), optimizer run
/// against median MRE on the validation slice, winner refit on the full
/// training partition. The test bin never reaches the objective.
fn tune_and_predict(
    treatment: Treatment,
    space: &Space,
    train: &Dataset,
    test_rows: &[&[f64]],
    seed: u64,
    collect_trace: bool,
) -> Result<Predictions> {
    let n = train.n_rows();
    let mut order: Vec<usize> = (0..n).collect();
    seeding::shuffle(&mut seeding::rng(seed_for(seed, &["inner-split"])), &mut order);
    let val_len = (n / 3).max(1);
    let build_len = n - val_len;
    if build_len < 2 {
        return Err(Error::InvalidData(format!(
            "training partition of {n} rows is too small to tune"
        )));
    }
    let build = train.subset(&order[..build_len]);
    let val_rows: Vec<&[f64]> = order[build_len..]
        .iter()
        .map(|&i| train.rows[i].as_slice())
        .collect();
    let val_actuals: Vec<f64> = order[build_len..].iter().map(|&i| train.efforts[i]).collect();

    let score_candidate = |candidate: &Candidate| -> f64 {
        let preds: Result<Vec<f64>> = match treatment {
            Treatment::CartRd | Treatment::CartDe | Treatment::CartFlash => {
                CartParams::from_candidate(space, candidate)
                    .and_then(|p| TreeModel::fit(&build, &p, seed_for(seed, &["inner-fit"])))
                    .and_then(|m| val_rows.iter().map(|r| m.predict(r)).collect())
            }
            _ => AbeConfig::from_candidate(space, candidate)
                .and_then(|c| AbeModel::fit(&build, &c, seed_for(seed, &["inner-fit"])))
                .and_then(|m| val_rows.iter().map(|r| m.predict(r)).collect()),
        };
        match preds {
            Ok(p) => median_mre(&val_actuals, &p).unwrap_or(f64::INFINITY),
            Err(_) => f64::INFINITY,
        }
    };

    let mut objective = Objective::new(score_candidate);
    let optimizer_seed = seed_for(seed, &["optimizer"]);
    let winner = match treatment {
        Treatment::CartRd | Treatment::AbenRd => {
            random_search(space, &mut objective, DEFAULT_EVALS, optimizer_seed)?
        }
        Treatment::CartDe | Treatment::AbenDe => {
            de_optimize(space, &mut objective, &DeParams::default(), optimizer_seed)?.best
        }
        Treatment::CartFlash => {
            flash_optimize(space, &mut objective, &FlashParams::default(), optimizer_seed)?
        }
        _ => unreachable!("only tuned treatments reach the tuner"),
    };

    let final_seed = seed_for(seed, &["final-fit"]);
    let preds: Vec<f64> = match treatment {
        Treatment::CartRd | Treatment::CartDe | Treatment::CartFlash => {
            let params = CartParams::from_candidate(space, &winner)?;
            let model = TreeModel::fit(train, &params, final_seed)?;
            test_rows
                .iter()
                .map(|row| model.predict(row))
                .collect::<Result<_>>()?
        }
        _ => {
            let config = AbeConfig::from_candidate(space, &winner)?;
            let model = AbeModel::fit(train, &config, final_seed)?;
            test_rows
                .iter()
                .map(|row| model.predict(row))
                .collect::<Result<_>>()?
        }
    };
    let trace = collect_trace.then(|| objective.into_trace());
    Ok((preds, trace))
}
