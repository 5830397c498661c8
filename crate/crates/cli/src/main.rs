//! Benchmark CLI: run treatments over datasets with M*N cross-validation,
//! then render Scott-Knott rank tables and win counts from a saved store.

use std::fs;
use std::path::{Path, PathBuf};

use anyhow::{bail, Context, Result};
use clap::{Parser, Subcommand};

use estima_core::harness::{
    render_report, run_experiment, summarize_wins, ExperimentPlan, Metric, ResultStore, Treatment,
};

#[derive(Parser)]
#[command(name = "estima", version, about = "Effort-estimation tuning benchmark")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run an experiment and write the result store plus rank tables.
    Run {
        /// Directory holding <name>.csv files and manifests/<name>.drop.
        #[arg(long, default_value = "data")]
        data: PathBuf,
        /// Comma-separated dataset names, or `all` for every CSV in --data.
        #[arg(long, default_value = "all")]
        datasets: String,
        /// Comma-separated treatment tokens, or `all`.
        #[arg(long, default_value = "all")]
        treatments: String,
        /// Cross-validation repeats (M).
        #[arg(long, default_value_t = 20)]
        repeats: usize,
        /// Bins per repeat (N).
        #[arg(long, default_value_t = 3)]
        bins: usize,
        #[arg(long, default_value_t = 1)]
        seed: u64,
        #[arg(long, default_value = "out")]
        out: PathBuf,
        /// CI profile: 3 repeats instead of 20.
        #[arg(long)]
        quick: bool,
        /// Skip optimizer trace CSVs.
        #[arg(long)]
        no_traces: bool,
    },
    /// Render the rank table for one dataset and metric from a store.
    Report {
        #[arg(long)]
        store: PathBuf,
        #[arg(long)]
        dataset: String,
        /// `mre` or `sa`.
        #[arg(long)]
        metric: String,
    },
    /// Count rank-1 appearances across every dataset and metric.
    Wins {
        #[arg(long)]
        store: PathBuf,
    },
}

fn discover_datasets(data_dir: &Path) -> Result<Vec<String>> {
    let mut names = Vec::new();
    for entry in fs::read_dir(data_dir)
        .with_context(|| format!("reading data directory {}", data_dir.display()))?
    {
        let path = entry?.path();
        if path.extension().is_some_and(|e| e == "csv") {
            if let Some(stem) = path.file_stem() {
                names.push(stem.to_string_lossy().into_owned());
            }
        }
    }
    if names.is_empty() {
        bail!("no CSV datasets found under {}", data_dir.display());
    }
    names.sort();
    Ok(names)
}

fn run(
    data: PathBuf,
    datasets: String,
    treatments: String,
    repeats: usize,
    bins: usize,
    seed: u64,
    out: PathBuf,
    quick: bool,
    no_traces: bool,
) -> Result<()> {
    let dataset_names = if datasets.trim() == "all" {
        discover_datasets(&data)?
    } else {
        datasets
            .split(',')
            .map(|s| s.trim().to_string())
            .filter(|s| !s.is_empty())
            .collect()
    };
    let treatment_list: Vec<Treatment> = if treatments.trim() == "all" {
        Treatment::ALL.to_vec()
    } else {
        treatments
            .split(',')
            .map(|s| Treatment::parse(s.trim()))
            .collect::<estima_core::Result<_>>()?
    };
    let plan = ExperimentPlan {
        datasets: dataset_names,
        treatments: treatment_list,
        repeats: if quick { 3 } else { repeats },
        bins,
        master_seed: seed,
        collect_traces: !no_traces,
    };
    eprintln!(
        "running {} dataset(s) x {} treatment(s), {} repeats of {} bins, seed {}",
        plan.datasets.len(),
        plan.treatments.len(),
        plan.repeats,
        plan.bins,
        plan.master_seed
    );
    let store = run_experiment(&plan, &data)?;
    store.save(&out)?;
    eprintln!(
        "recorded {} fold scores ({} failures) -> {}",
        store.records.len(),
        store.failures.len(),
        out.display()
    );
    for failure in &store.failures {
        eprintln!("  failed cell: {failure}");
    }

    let reports_dir = out.join("reports");
    fs::create_dir_all(&reports_dir)?;
    for dataset in &store.manifest.plan.datasets {
        for metric in Metric::BOTH {
            let report = render_report(&store, dataset, metric)?;
            let base = format!("{dataset}_{}", metric.label());
            fs::write(reports_dir.join(format!("{base}.txt")), &report.text)?;
            fs::write(reports_dir.join(format!("{base}.csv")), &report.csv)?;
        }
    }
    let wins = summarize_wins(&store)?;
    fs::write(reports_dir.join("wins.txt"), wins.render())?;
    println!("{}", wins.render());
    Ok(())
}

fn main() -> Result<()> {
    match Cli::parse().command {
        Command::Run {
            data,
            datasets,
            treatments,
            repeats,
            bins,
            seed,
            out,
            quick,
            no_traces,
        } => run(
            data, datasets, treatments, repeats, bins, seed, out, quick, no_traces,
        ),
        Command::Report {
            store,
            dataset,
            metric,
        } => {
            let store = ResultStore::load(&store)?;
            let report = render_report(&store, &dataset, Metric::parse(&metric)?)?;
            print!("{}", report.text);
            Ok(())
        }
        Command::Wins { store } => {
            let store = ResultStore::load(&store)?;
            print!("{}", summarize_wins(&store)?.render());
            Ok(())
        }
    }
}
