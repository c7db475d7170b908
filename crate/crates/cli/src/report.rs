//! Summaries of finished runs.

use std::fmt::Write as _;
use std::path::Path;

use anyhow::{bail, Context};

use crate::config::ExperimentConfig;
use crate::experiment::{read_records, Record, MANIFEST, RECORDS};
use crate::stats::quartiles;

/// Median and interquartile range of every metric, grouped by row, circuit
/// and column.
pub fn summarize(dir: &Path) -> anyhow::Result<String> {
    if !dir.join(MANIFEST).exists() || !dir.join(RECORDS).exists() {
        bail!(
            "{} has no {MANIFEST} and {RECORDS}; run `qsvm reproduce <experiment> --out {}` first",
            dir.display(),
            dir.display()
        );
    }
    let config = ExperimentConfig::load(&dir.join(MANIFEST)).context("reading the run manifest")?;
    let records = read_records(dir)?;
    Ok(render(&config, &records))
}

pub fn render(config: &ExperimentConfig, records: &[Record]) -> String {
    let mut keys: Vec<(&str, &str, &str, &str)> = Vec::new();
    for r in records {
        let k = (r.row.as_str(), r.circuit.as_str(), r.column.as_str(), r.metric.as_str());
        if !keys.contains(&k) {
            keys.push(k);
        }
    }
    let mut out = String::new();
    let _ = writeln!(out, "experiment {} over seeds {:?}", config.experiment.name(), config.seeds);
    let _ = writeln!(out, "{:<16} {:<8} {:<10} {:<22} {:>12} {:>12} {:>12} {:>3}", "row", "circuit", "column", "metric", "median", "q1", "q3", "n");
    for (row, circuit, column, metric) in keys {
        let v: Vec<f64> = records
            .iter()
            .filter(|r| r.row == row && r.circuit == circuit && r.column == column && r.metric == metric)
            .map(|r| r.value)
            .collect();
        let (q1, med, q3) = quartiles(&v);
        let _ = writeln!(
            out,
            "{row:<16} {circuit:<8} {column:<10} {metric:<22} {med:>12.5} {q1:>12.5} {q3:>12.5} {:>3}",
            v.len()
        );
    }
    out
}
