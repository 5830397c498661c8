//! Rank-table rendering and the cross-dataset win-count league.

use std::collections::BTreeMap;

use crate::error::{Error, Result};
use crate::harness::store::ResultStore;
use crate::metrics::percentile;
use crate::seeding::seed_for;
use crate::stats::{scott_knott, Orientation, RankTable};

/// Which score column a report ranks, and in which direction.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Metric {
    Mre,
    Sa,
}

impl Metric {
    pub const BOTH: [Metric; 2] = [Metric::Mre, Metric::Sa];

    pub fn parse(s: &str) -> Result<Metric> {
        match s.to_ascii_lowercase().as_str() {
            "mre" => Ok(Metric::Mre),
            "sa" => Ok(Metric::Sa),
            other => Err(Error::InvalidArgument(format!(
                "unknown metric `{other}` (expected mre or sa)"
            ))),
        }
    }

    pub fn label(self) -> &'static str {
        match self {
            Metric::Mre => "mre",
            Metric::Sa => "sa",
        }
    }

    pub fn orientation(self) -> Orientation {
        match self {
            Metric::Mre => Orientation::SmallerBetter,
            Metric::Sa => Orientation::LargerBetter,
        }
    }
}

#[derive(Debug, Clone)]
pub struct Report {
    pub dataset: String,
    pub metric: Metric,
    pub table: RankTable,
    /// Aligned text table with a quartile glyph column.
    pub text: String,
    /// Machine-readable form: rank,treatment,median,iqr,fast,runtime_seconds.
    pub csv: String,
}

const GLYPH_WIDTH: usize = 26;

fn glyph(median: f64, q1: f64, q3: f64) -> String {
    if !(0.0..=100.0).contains(&median) {
        return format!("{:^GLYPH_WIDTH$}", "*outside 0..100*");
    }
    let pos = |v: f64| -> usize {
        ((v / 100.0) * (GLYPH_WIDTH - 1) as f64)
            .round()
            .clamp(0.0, (GLYPH_WIDTH - 1) as f64) as usize
    };
    let (lo, hi, med) = (pos(q1.max(0.0)), pos(q3.min(100.0)), pos(median));
    let mut cells = vec![b' '; GLYPH_WIDTH];
    for c in cells.iter_mut().take(hi + 1).skip(lo) {
        *c = b'-';
    }
    cells[med] = b'*';
    String::from_utf8(cells).expect("ascii glyph")
}

/// Rank one dataset's treatments under one metric and render the table.
pub fn render_report(store: &ResultStore, dataset: &str, metric: Metric) -> Result<Report> {
    let samples = store.samples_for(dataset, metric);
    if samples.is_empty() {
        return Err(Error::InvalidArgument(format!(
            "store has no records for dataset `{dataset}`"
        )));
    }
    let seed = seed_for(
        store.manifest.plan.master_seed,
        &["scott-knott", dataset, metric.label()],
    );
    let table = scott_knott(&samples, metric.orientation(), seed);

    let quartiles: BTreeMap<&str, (f64, f64)> = samples
        .iter()
        .map(|s| {
            (
                s.token.as_str(),
                (percentile(&s.scores, 25.0), percentile(&s.scores, 75.0)),
            )
        })
        .collect();
    let runtime: BTreeMap<&str, f64> = samples
        .iter()
        .map(|s| (s.token.as_str(), s.runtime_seconds))
        .collect();

    let direction = match metric.orientation() {
        Orientation::SmallerBetter => "smaller is better",
        Orientation::LargerBetter => "larger is better",
    };
    let mut text = format!(
        "# {dataset} - {} ({direction}); * marks fastest rank-1 rows\n",
        metric.label().to_uppercase()
    );
    text.push_str(&format!(
        "{:>4} {:<12} {:>8} {:>8}  |{:^GLYPH_WIDTH$}|\n",
        "rank", "treatment", "med", "iqr", "0..100"
    ));
    let mut csv = String::from("rank,treatment,median,iqr,fast,runtime_seconds\n");
    for e in &table.entries {
        let (q1, q3) = quartiles[e.token.as_str()];
        let fast_mark = if e.fast { "*" } else { " " };
        text.push_str(&format!(
            "{:>4}{fast_mark}{:<12} {:>8.1} {:>8.1}  |{}|\n",
            e.rank,
            e.token,
            e.median,
            e.iqr,
            glyph(e.median, q1, q3)
        ));
        csv.push_str(&format!(
            "{},{},{:.6},{:.6},{},{:.3}\n",
            e.rank, e.token, e.median, e.iqr, e.fast, runtime[e.token.as_str()]
        ));
    }
    Ok(Report {
        dataset: dataset.to_string(),
        metric,
        table,
        text,
        csv,
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct WinEntry {
    pub token: String,
    pub wins: usize,
    pub total: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct WinTable {
    pub entries: Vec<WinEntry>,
}

impl WinTable {
    pub fn render(&self) -> String {
        let mut out = String::from("treatment     rank-1 wins\n");
        for e in &self.entries {
            out.push_str(&format!("{:<12} {:>6}/{}\n", e.token, e.wins, e.total));
        }
        out
    }
}

/// Count rank-1 appearances per treatment across every (dataset, metric)
/// table in the store. Treatments missing from a table contribute zero.
pub fn summarize_wins(store: &ResultStore) -> Result<WinTable> {
    let mut wins: BTreeMap<String, usize> = BTreeMap::new();
    for t in &store.manifest.plan.treatments {
        wins.insert(t.token().to_string(), 0);
    }
    let mut total = 0;
    for dataset in &store.manifest.plan.datasets {
        for metric in Metric::BOTH {
            let report = render_report(store, dataset, metric)?;
            total += 1;
            for e in &report.table.entries {
                if e.rank == 1 {
                    *wins.entry(e.token.clone()).or_insert(0) += 1;
                }
            }
        }
    }
    let mut entries: Vec<WinEntry> = wins
        .into_iter()
        .map(|(token, wins)| WinEntry { token, wins, total })
        .collect();
    entries.sort_by(|a, b| b.wins.cmp(&a.wins).then(a.token.cmp(&b.token)));
    Ok(WinTable { entries })
}
