use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use std::hint::black_box;

use estima_bench::synthetic_dataset;
use estima_core::abe::{AbeConfig, AbeModel};
use estima_core::baselines::{AtlmModel, Lp4eeModel};
use estima_core::cart::{CartParams, RandomForest, TreeModel};

fn bench_cart_fit(c: &mut Criterion) {
    let mut group = c.benchmark_group("cart_fit");
    for &rows in &[50usize, 200, 500] {
        let d = synthetic_dataset(rows, 8, 1);
        group.bench_with_input(BenchmarkId::from_parameter(rows), &rows, |b, _| {
            b.iter(|| TreeModel::fit(black_box(&d), &CartParams::default(), 3).unwrap())
        });
    }
    group.finish();
}

fn bench_rf_fit(c: &mut Criterion) {
    let d = synthetic_dataset(200, 8, 2);
    c.bench_function("rf_fit_100_trees_200_rows", |b| {
        b.iter(|| RandomForest::fit(black_box(&d), 100, 5).unwrap())
    });
}

fn bench_abe_predict(c: &mut Criterion) {
    let d = synthetic_dataset(300, 8, 3);
    let model = AbeModel::fit(&d, &AbeConfig::abe0(), 0).unwrap();
    let probe: Vec<f64> = d.rows[7].clone();
    c.bench_function("abe0_predict_300_rows", |b| {
        b.iter(|| model.predict(black_box(&probe)).unwrap())
    });
}

fn bench_baselines(c: &mut Criterion) {
    let d = synthetic_dataset(150, 6, 4);
    let mask = vec![false; 6];
    c.bench_function("atlm_fit_150_rows", |b| {
        b.iter(|| AtlmModel::fit(black_box(&d), &mask).unwrap())
    });
    c.bench_function("lp4ee_fit_150_rows", |b| {
        b.iter(|| Lp4eeModel::fit(black_box(&d)).unwrap())
    });
}

criterion_group!(
    benches,
    bench_cart_fit,
    bench_rf_fit,
    bench_abe_predict,
    bench_baselines
);
criterion_main!(benches);
