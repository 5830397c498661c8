//! End-to-end harness contracts: counting, determinism, fold sharing,
//! budget audit, and the store/report round trip.

use std::path::PathBuf;

use estima_core::dataset::make_folds;
use estima_core::harness::{
    load_cleaned_dataset, render_report, run_experiment, run_single_cell, ExperimentPlan, Metric,
    ResultStore, Treatment,
};
use estima_core::seeding::seed_for;

fn data_dir() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../data")
}

fn plan(datasets: &[&str], treatments: Vec<Treatment>, repeats: usize) -> ExperimentPlan {
    ExperimentPlan {
        datasets: datasets.iter().map(|s| s.to_string()).collect(),
        treatments,
        repeats,
        bins: 3,
        master_seed: 17,
        collect_traces: false,
    }
}

#[test]
fn record_counting_contract() {
    let plan = plan(&["kemerer"], vec![Treatment::Abe0, Treatment::Cart], 2);
    let store = run_experiment(&plan, &data_dir()).unwrap();
    // 2 repeats x 3 bins x 2 treatments
    assert_eq!(store.records.len(), 12);
    assert!(store.failures.is_empty());
}

#[test]
fn identical_plans_reproduce_identical_scores() {
    let plan = plan(&["kemerer"], vec![Treatment::Cart, Treatment::Lp4ee], 2);
    let a = run_experiment(&plan, &data_dir()).unwrap();
    let b = run_experiment(&plan, &data_dir()).unwrap();
    assert_eq!(a.records.len(), b.records.len());
    for (x, y) in a.records.iter().zip(&b.records) {
        assert_eq!(
            format!("{}|{}|{}|{}|{:.12}|{:.12}", x.treatment, x.dataset, x.repeat, x.fold, x.mdmre, x.sa),
            format!("{}|{}|{}|{}|{:.12}|{:.12}", y.treatment, y.dataset, y.repeat, y.fold, y.mdmre, y.sa),
        );
    }
}

#[test]
fn all_treatments_share_fold_partitions() {
    // Two runs with disjoint treatment sets must derive identical folds.
    let a = run_experiment(&plan(&["albrecht"], vec![Treatment::Abe0], 2), &data_dir()).unwrap();
    let b = run_experiment(&plan(&["albrecht"], vec![Treatment::Atlm], 2), &data_dir()).unwrap();
    assert_eq!(a.fold_hashes, b.fold_hashes);
    // And within one run the hashes are recorded once per (repeat, fold).
    assert_eq!(a.fold_hashes.len(), 2 * 3);
}

#[test]
fn tuned_cells_log_exactly_220_true_evaluations() {
    let mut p = plan(&["kemerer"], vec![Treatment::CartRd], 1);
    p.collect_traces = true;
    let store = run_experiment(&p, &data_dir()).unwrap();
    assert_eq!(store.traces.len(), 3);
    for trace in &store.traces {
        assert_eq!(trace.rows.len(), 220, "budget audit");
        // Indices are the evaluation order.
        for (i, row) in trace.rows.iter().enumerate() {
            assert_eq!(row.index, i);
        }
    }
}

#[test]
fn single_cell_rerun_is_byte_identical() {
    let p = plan(&["albrecht"], vec![Treatment::CartDe], 1);
    let d = load_cleaned_dataset(&data_dir(), "albrecht").unwrap();
    let folds = make_folds(&d, 1, 3, seed_for(p.master_seed, &[&d.name, "folds"])).unwrap();
    let (a, _) = run_single_cell(&d, &folds, Treatment::CartDe, 0, 1, &p).unwrap();
    let (b, _) = run_single_cell(&d, &folds, Treatment::CartDe, 0, 1, &p).unwrap();
    assert_eq!(a.mdmre.to_bits(), b.mdmre.to_bits());
    assert_eq!(a.sa.to_bits(), b.sa.to_bits());
}

#[test]
fn store_round_trip_reproduces_the_rank_table() {
    let p = plan(
        &["kemerer"],
        vec![Treatment::Abe0, Treatment::Cart, Treatment::Atlm],
        2,
    );
    let store = run_experiment(&p, &data_dir()).unwrap();
    let dir = tempfile::tempdir().unwrap();
    store.save(dir.path()).unwrap();
    let loaded = ResultStore::load(dir.path()).unwrap();
    assert_eq!(loaded.records, store.records);
    assert_eq!(loaded.fold_hashes, store.fold_hashes);
    for metric in Metric::BOTH {
        let before = render_report(&store, "kemerer", metric).unwrap();
        let after = render_report(&loaded, "kemerer", metric).unwrap();
        assert_eq!(before.table, after.table);
        assert_eq!(before.csv, after.csv);
    }
}

#[test]
fn failures_are_recorded_not_dropped() {
    // All-zero efforts leave no positive actual in any test bin: every
    // cell must fail and be recorded, never silently skipped.
    let dir = tempfile::tempdir().unwrap();
    let csv = "x,y,Effort\n1,2,0\n2,3,0\n3,4,0\n4,5,0\n5,6,0\n6,7,0\n";
    std::fs::write(dir.path().join("zeros.csv"), csv).unwrap();
    let p = plan(&["zeros"], vec![Treatment::Cart], 1);
    let store = run_experiment(&p, dir.path()).unwrap();
    assert!(store.records.is_empty());
    assert_eq!(store.failures.len(), 3);
    for f in &store.failures {
        assert!(f.message.contains("positive actual"), "{}", f.message);
    }
}

#[test]
fn missing_dataset_files_error_the_whole_run() {
    let p = plan(&["missing"], vec![Treatment::Cart], 1);
    assert!(run_experiment(&p, &data_dir()).is_err());
}
