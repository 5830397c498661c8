//! Contracts of the bundled datasets and their cleaning manifests.

use std::path::PathBuf;

use estima_core::baselines::{exact_guess_mae, mean_predictor, random_guess_mae};
use estima_core::dataset::{load_drop_manifest, Dataset};
use estima_core::harness::load_cleaned_dataset;
use estima_core::metrics::mae;

fn data_dir() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../data")
}

const ROSTER: [(&str, usize, usize); 9] = [
    ("kemerer", 15, 6),
    ("albrecht", 24, 7),
    ("isbsg10", 37, 11),
    ("finnish", 38, 7),
    ("miyazaki", 48, 7),
    ("maxwell", 62, 25),
    ("desharnais", 77, 6),
    ("kitchenham", 145, 6),
    ("china", 499, 16),
];

#[test]
fn roster_shapes_match_the_declared_counts() {
    let mut total_rows = 0;
    for (name, rows, features) in ROSTER {
        let d = Dataset::from_csv_path(data_dir().join(format!("{name}.csv")), None).unwrap();
        assert_eq!(d.n_rows(), rows, "{name} rows");
        assert_eq!(d.n_features(), features, "{name} features");
        assert!(d.efforts.iter().all(|e| *e > 0.0), "{name} efforts positive");
        total_rows += rows;
    }
    assert_eq!(total_rows, 945);
}

#[test]
fn kemerer_manifest_keeps_three_predictive_features() {
    let raw = Dataset::from_csv_path(data_dir().join("kemerer.csv"), None).unwrap();
    let drop = load_drop_manifest(data_dir().join("manifests/kemerer.drop")).unwrap();
    assert_eq!(drop, vec!["Duration", "KSLOC", "RAWFP"]);
    let cleaned = raw.drop_features(&drop).unwrap();
    assert_eq!(cleaned.n_features(), 3);
    assert!(cleaned.feature_names.contains(&"AdjFP".to_string()));
    assert_eq!(cleaned.n_rows(), raw.n_rows());
    // Language and Hardware arrived as text and carry codebooks.
    let mask = cleaned.categorical_mask();
    assert_eq!(mask.iter().filter(|m| **m).count(), 2);
}

#[test]
fn every_manifest_applies_cleanly() {
    for (name, rows, _) in ROSTER {
        let cleaned = load_cleaned_dataset(&data_dir(), name).unwrap();
        assert_eq!(cleaned.n_rows(), rows, "{name} row count after cleaning");
        assert!(cleaned.n_features() >= 3, "{name} kept features");
    }
}

#[test]
fn isbsg10_manifest_drops_nothing() {
    let drop = load_drop_manifest(data_dir().join("manifests/isbsg10.drop")).unwrap();
    assert!(drop.is_empty());
    let cleaned = load_cleaned_dataset(&data_dir(), "isbsg10").unwrap();
    assert_eq!(cleaned.n_features(), 11);
}

#[test]
fn china_manifest_keeps_the_six_modeling_features() {
    let cleaned = load_cleaned_dataset(&data_dir(), "china").unwrap();
    assert_eq!(
        cleaned.feature_names,
        vec!["Input", "Output", "Enquiry", "File", "Interface", "Resource"]
    );
}

/// The sampled guess baseline converges on the closed-form expectation and
/// the sample-mean predictor matches it within 2% on the bundled data.
#[test]
fn mean_predictor_tracks_the_converged_guess_baseline() {
    for name in ["kemerer", "albrecht", "china"] {
        let d = load_cleaned_dataset(&data_dir(), name).unwrap();
        let guess = random_guess_mae(&d.efforts, &d.efforts, 100_000, 11).unwrap();
        let exact = exact_guess_mae(&d.efforts, &d.efforts).unwrap();
        assert!(
            (guess - exact).abs() / exact < 0.01,
            "{name}: sampled {guess} vs exact {exact}"
        );
        let constant = mean_predictor(&d.efforts).unwrap();
        let predictions = vec![constant; d.n_rows()];
        let model_mae = mae(&d.efforts, &predictions).unwrap();
        let gap = (model_mae - guess).abs() / guess;
        assert!(gap < 0.02, "{name}: relative gap {gap}");
    }
}
