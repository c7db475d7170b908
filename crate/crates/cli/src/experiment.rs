//! Experiment pipelines and their artifacts.

use std::fs;
use std::path::{Path, PathBuf};

use anyhow::Context;
use qsvm_core::ansatz::Registry;
use qsvm_core::dataset::{make_split, Regime, SplitPlan};
use qsvm_core::metrics::{entangling_samples, expressibility};
use qsvm_core::qsvm::{train, Hyperparams, TrainOutcome};
use qsvm_core::rng::{derive_seed, rng};
use qsvm_core::sim::{fidelity, swap_test_estimate};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::config::{ExperimentConfig, ExperimentKind};
use crate::stats::{mean, median, quartiles, variance};

pub const MANIFEST: &str = "manifest.toml";
pub const RECORDS: &str = "records.csv";
pub const FAILURES: &str = "failures.csv";
pub const LOSS_TRACE: &str = "loss_trace.csv";

/// Column label of the shot-noise simulator in table3. Device noise is not
/// modelled.
pub const SHOT_NOISE: &str = "shot-noise";
pub const EXACT: &str = "exact";
/// Placeholder for the real-hardware column of table3.
pub const ABSENT: &str = "-";

const EVAL_STREAM: u64 = 0xE7A1;

/// One measured value of one (row, circuit, column, seed) cell.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Record {
    pub row: String,
    pub circuit: String,
    pub column: String,
    pub seed: u64,
    pub metric: String,
    pub value: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Failure {
    pub row: String,
    pub circuit: String,
    pub column: String,
    pub seed: u64,
    pub error: String,
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunSummary {
    pub output_dir: PathBuf,
    pub files: Vec<PathBuf>,
    pub records: usize,
    pub failures: Vec<Failure>,
}

#[derive(Debug, Clone)]
struct Cell {
    regime: Option<Regime>,
    circuit: String,
    column: &'static str,
    seed: u64,
}

impl Cell {
    fn row(&self) -> String {
        self.regime.map_or_else(|| ABSENT.to_string(), |r| r.row_label().to_string())
    }

    fn record(&self, metric: &str, value: f64) -> Record {
        Record {
            row: self.row(),
            circuit: self.circuit.clone(),
            column: self.column.to_string(),
            seed: self.seed,
            metric: metric.to_string(),
            value,
        }
    }
}

struct CellOutput {
    records: Vec<Record>,
    trace: Vec<f64>,
}

struct Runner<'a> {
    config: &'a ExperimentConfig,
    registry: &'a Registry,
}

impl Runner<'_> {
    fn train_cell(&self, cell: &Cell, hyper: &Hyperparams) -> anyhow::Result<CellOutput> {
        let regime = cell.regime.expect("training cells carry a regime");
        let template = self.registry.get(&cell.circuit)?.with_blocks(self.config.n_blocks);
        let plan = SplitPlan {
            mu_qubits: template.n_qubits,
            ..SplitPlan::new(regime, self.config.dataset.m_train, self.config.dataset.m_test)
        };
        let split = make_split(&plan, cell.seed)?;
        let TrainOutcome { model, trace } = train(&split, &template, hyper, cell.seed)?;
        let eval = model.evaluate(&split.test, hyper.shots, derive_seed(cell.seed, EVAL_STREAM))?;
        let records = vec![
            cell.record("accuracy", eval.accuracy()),
            cell.record("initial_loss", model.initial_loss),
            cell.record("final_loss", model.final_loss),
        ];
        Ok(CellOutput { records, trace })
    }

    fn metrics_cell(&self, cell: &Cell) -> anyhow::Result<CellOutput> {
        let circuit = self.registry.build(&cell.circuit, self.config.n_blocks)?;
        let m = &self.config.metrics;
        let records = match self.config.experiment {
            ExperimentKind::Table1 => {
                let qs = entangling_samples(&circuit, m.n_samples, cell.seed)?;
                vec![
                    cell.record("entangling_capability", mean(&qs)),
                    cell.record("q_mean", mean(&qs)),
                    cell.record("q_variance", variance(&qs)),
                ]
            }
            _ => {
                let ex = expressibility(&circuit, m.n_samples, m.n_bins, cell.seed)?;
                vec![
                    cell.record("expressibility_kl", ex.kl),
                    cell.record("fidelity_mean", ex.fidelity_mean),
                    cell.record("fidelity_variance", ex.fidelity_variance),
                ]
            }
        };
        Ok(CellOutput { records, trace: Vec::new() })
    }

    fn shot_cell(&self, cell: &Cell) -> anyhow::Result<CellOutput> {
        let mut r = rng(derive_seed(cell.seed, 0x5407));
        let a = Regime::TwoQubitPartial.sample_entangled(&mut r).state;
        let b = Regime::TwoQubitPartial.sample_separable(&mut r).state;
        let f = fidelity(&a, &b)?;
        let mut records = vec![cell.record("fidelity", f)];
        for &shots in &self.config.shots.sweep {
            let estimates = (0..self.config.shots.repetitions)
                .map(|k| swap_test_estimate(&a, &b, shots, derive_seed(derive_seed(cell.seed, shots), k as u64)))
                .collect::<Result<Vec<_>, _>>()?;
            records.push(cell.record(&format!("mean@{shots}"), mean(&estimates)));
            records.push(cell.record(&format!("variance@{shots}"), variance(&estimates)));
        }
        Ok(CellOutput { records, trace: Vec::new() })
    }

    fn run_cells(&self, cells: &[Cell], job: impl Fn(&Cell) -> anyhow::Result<CellOutput> + Sync) -> Vec<Result<CellOutput, String>> {
        cells.par_iter().map(|c| job(c).map_err(|e| format!("{e:#}"))).collect()
    }
}

fn training_cells(config: &ExperimentConfig, registry: &Registry, column: &'static str) -> Vec<Cell> {
    let mut cells = Vec::new();
    for &regime in &config.dataset.regimes {
        for circuit in config.circuits_for(registry, regime) {
            for &seed in &config.seeds {
                cells.push(Cell { regime: Some(regime), circuit: circuit.clone(), column, seed });
            }
        }
    }
    cells
}

fn write_csv<T: Serialize>(path: &Path, rows: &[T]) -> anyhow::Result<()> {
    let mut w = csv::Writer::from_path(path).with_context(|| format!("writing {}", path.display()))?;
    for r in rows {
        w.serialize(r)?;
    }
    w.flush()?;
    Ok(())
}

fn write_table(path: &Path, header: &[&str], rows: &[Vec<String>]) -> anyhow::Result<()> {
    let mut w = csv::Writer::from_path(path).with_context(|| format!("writing {}", path.display()))?;
    w.write_record(header)?;
    for r in rows {
        w.write_record(r)?;
    }
    w.flush()?;
    Ok(())
}

/// Values of `metric` for one (row, circuit, column), in seed order.
fn values(records: &[Record], row: &str, circuit: &str, column: &str, metric: &str) -> Vec<f64> {
    records
        .iter()
        .filter(|r| r.row == row && r.circuit == circuit && r.column == column && r.metric == metric)
        .map(|r| r.value)
        .collect()
}

fn pct(x: f64) -> String {
    if x.is_nan() {
        ABSENT.to_string()
    } else {
        format!("{:.2}", 100.0 * x)
    }
}

fn fixed(x: f64, digits: usize) -> String {
    if x.is_nan() {
        ABSENT.to_string()
    } else {
        format!("{x:.digits$}")
    }
}

fn sci(x: f64) -> String {
    if x.is_nan() {
        ABSENT.to_string()
    } else {
        format!("{x:.3e}")
    }
}

#[derive(Default)]
struct Sink {
    records: Vec<Record>,
    failures: Vec<Failure>,
    traces: Vec<(Cell, Vec<f64>)>,
}

impl Sink {
    fn absorb(&mut self, cells: &[Cell], results: Vec<Result<CellOutput, String>>) {
        for (cell, res) in cells.iter().zip(results) {
            match res {
                Ok(o) => {
                    self.records.extend(o.records);
                    if !o.trace.is_empty() {
                        self.traces.push((cell.clone(), o.trace));
                    }
                }
                Err(error) => self.failures.push(Failure {
                    row: cell.row(),
                    circuit: cell.circuit.clone(),
                    column: cell.column.to_string(),
                    seed: cell.seed,
                    error,
                }),
            }
        }
    }
}

/// Runs `config`, writing every artifact into `out`.
pub fn run(config: &ExperimentConfig, registry: &Registry, out: &Path) -> anyhow::Result<RunSummary> {
    config.validate(registry)?;
    fs::create_dir_all(out).with_context(|| format!("creating {}", out.display()))?;
    let runner = Runner { config, registry };
    let mut sink = Sink::default();
    let mut files = Vec::new();

    let kind = config.experiment;
    match kind {
        ExperimentKind::Table1 | ExperimentKind::Table2 => {
            let mut cells = training_cells(config, registry, EXACT);
            cells.truncate(cells.len() / config.dataset.regimes.len());
            let res = runner.run_cells(&cells, |c| runner.train_cell(c, &config.hyper));
            sink.absorb(&cells, res);
            let metric_cells: Vec<Cell> = cells.iter().map(|c| Cell { regime: None, ..c.clone() }).collect();
            let res = runner.run_cells(&metric_cells, |c| runner.metrics_cell(c));
            sink.absorb(&metric_cells, res);

            let row = cells[0].row();
            let circuits = config.circuits_for(registry, config.dataset.regimes[0]);
            let (header, names): (&[&str], [&str; 3]) = if kind == ExperimentKind::Table1 {
                (
                    &["circuit", "accuracy", "entangling_capability", "q_mean", "q_variance"],
                    ["entangling_capability", "q_mean", "q_variance"],
                )
            } else {
                (
                    &["circuit", "accuracy", "expressibility_kl", "fidelity_mean", "fidelity_variance"],
                    ["expressibility_kl", "fidelity_mean", "fidelity_variance"],
                )
            };
            let rows: Vec<Vec<String>> = circuits
                .iter()
                .map(|id| {
                    let acc = median(&values(&sink.records, &row, id, EXACT, "accuracy"));
                    let m = |k: usize| median(&values(&sink.records, ABSENT, id, EXACT, names[k]));
                    vec![id.clone(), pct(acc), fixed(m(0), 3), fixed(m(1), 3), sci(m(2))]
                })
                .collect();
            let path = out.join(format!("{}.csv", kind.name()));
            write_table(&path, header, &rows)?;
            files.push(path);
        }
        ExperimentKind::Table3 => {
            let cells = training_cells(config, registry, EXACT);
            let res = runner.run_cells(&cells, |c| runner.train_cell(c, &config.hyper));
            sink.absorb(&cells, res);

            let mut candidates = Vec::new();
            let mut best: Vec<(Regime, String)> = Vec::new();
            for &regime in &config.dataset.regimes {
                let row = regime.row_label();
                let mut top: Option<(f64, String)> = None;
                for id in config.circuits_for(registry, regime) {
                    let accs = values(&sink.records, row, &id, EXACT, "accuracy");
                    let (q1, med, q3) = quartiles(&accs);
                    candidates.push(vec![row.to_string(), id.clone(), pct(med), pct(q1), pct(q3)]);
                    if !med.is_nan() && top.as_ref().is_none_or(|(m, _)| med > *m) {
                        top = Some((med, id));
                    }
                }
                if let Some((_, id)) = top {
                    best.push((regime, id));
                }
            }
            let noisy_hyper = Hyperparams { shots: config.shots.noisy_shots, ..config.hyper };
            let noisy_cells: Vec<Cell> = best
                .iter()
                .flat_map(|(regime, id)| {
                    config.seeds.iter().map(move |&seed| Cell {
                        regime: Some(*regime),
                        circuit: id.clone(),
                        column: SHOT_NOISE,
                        seed,
                    })
                })
                .collect();
            let res = runner.run_cells(&noisy_cells, |c| runner.train_cell(c, &noisy_hyper));
            sink.absorb(&noisy_cells, res);

            let rows: Vec<Vec<String>> = best
                .iter()
                .map(|(regime, id)| {
                    let row = regime.row_label();
                    vec![
                        row.to_string(),
                        id.clone(),
                        pct(median(&values(&sink.records, row, id, EXACT, "accuracy"))),
                        pct(median(&values(&sink.records, row, id, SHOT_NOISE, "accuracy"))),
                        ABSENT.to_string(),
                    ]
                })
                .collect();
            let path = out.join("table3.csv");
            write_table(&path, &["row", "circuit", "simulator_exact", "simulator_shot_noise", "ibmq_real_system"], &rows)?;
            files.push(path);
            let path = out.join("table3_candidates.csv");
            write_table(&path, &["row", "circuit", "median_accuracy", "q1_accuracy", "q3_accuracy"], &candidates)?;
            files.push(path);
        }
        ExperimentKind::LossTrace | ExperimentKind::Custom => {
            let cells = training_cells(config, registry, EXACT);
            let res = runner.run_cells(&cells, |c| runner.train_cell(c, &config.hyper));
            sink.absorb(&cells, res);
            let mut rows = Vec::new();
            let mut seen = Vec::new();
            for c in &cells {
                let key = (c.row(), c.circuit.clone());
                if seen.contains(&key) {
                    continue;
                }
                let v = |m: &str| values(&sink.records, &key.0, &key.1, EXACT, m);
                let (q1, med, q3) = quartiles(&v("accuracy"));
                let init = median(&v("initial_loss"));
                let fin = median(&v("final_loss"));
                rows.push(vec![key.0.clone(), key.1.clone(), pct(med), pct(q1), pct(q3), fixed(init, 6), fixed(fin, 6)]);
                seen.push(key);
            }
            let header = [
                "row",
                "circuit",
                "median_accuracy",
                "q1_accuracy",
                "q3_accuracy",
                "median_initial_loss",
                "median_final_loss",
            ];
            let name = if kind == ExperimentKind::LossTrace { "loss_summary.csv" } else { "custom.csv" };
            let path = out.join(name);
            write_table(&path, &header, &rows)?;
            files.push(path);
        }
        ExperimentKind::ShotScaling => {
            let cells: Vec<Cell> = config
                .seeds
                .iter()
                .map(|&seed| Cell { regime: None, circuit: ABSENT.to_string(), column: EXACT, seed })
                .collect();
            let res = runner.run_cells(&cells, |c| runner.shot_cell(c));
            sink.absorb(&cells, res);
            let mut rows = Vec::new();
            for c in &cells {
                let mine: Vec<&Record> = sink.records.iter().filter(|r| r.seed == c.seed).collect();
                let lookup = |m: String| mine.iter().find(|r| r.metric == m).map_or(f64::NAN, |r| r.value);
                let f = lookup("fidelity".into());
                for &s in &config.shots.sweep {
                    rows.push(vec![
                        c.seed.to_string(),
                        s.to_string(),
                        fixed(f, 6),
                        fixed(lookup(format!("mean@{s}")), 6),
                        sci(lookup(format!("variance@{s}"))),
                        sci((1.0 - f * f) / s as f64),
                    ]);
                }
            }
            let path = out.join("shot_scaling.csv");
            write_table(&path, &["seed", "shots", "fidelity", "mean_estimate", "variance", "predicted_variance"], &rows)?;
            files.push(path);
        }
    }

    let Sink { records, failures, traces } = sink;
    if !traces.is_empty() && matches!(kind, ExperimentKind::LossTrace | ExperimentKind::Custom) {
        let mut rows = Vec::new();
        for (cell, trace) in &traces {
            for (k, l) in trace.iter().enumerate() {
                rows.push(vec![cell.row(), cell.circuit.clone(), cell.seed.to_string(), (k + 1).to_string(), l.to_string()]);
            }
        }
        let path = out.join(LOSS_TRACE);
        write_table(&path, &["row", "circuit", "seed", "iteration", "loss"], &rows)?;
        files.push(path);
    }

    let path = out.join(RECORDS);
    write_csv(&path, &records)?;
    files.push(path);
    let fail_path = out.join(FAILURES);
    if failures.is_empty() {
        if fail_path.exists() {
            fs::remove_file(&fail_path)?;
        }
    } else {
        write_csv(&fail_path, &failures)?;
        files.push(fail_path);
    }
    let path = out.join(MANIFEST);
    fs::write(&path, manifest_text(config))?;
    files.push(path);

    Ok(RunSummary { output_dir: out.to_path_buf(), files, records: records.len(), failures })
}

/// Manifest contents: the resolved configuration minus the output path.
pub fn manifest_text(config: &ExperimentConfig) -> String {
    format!(
        "# Rerun with: qsvm reproduce --config {MANIFEST} --out <dir>\n{}",
        config.to_toml()
    )
}

/// Reads the records of a finished run.
pub fn read_records(dir: &Path) -> anyhow::Result<Vec<Record>> {
    let path = dir.join(RECORDS);
    let mut r = csv::Reader::from_path(&path).with_context(|| format!("reading {}", path.display()))?;
    Ok(r.deserialize().collect::<Result<Vec<Record>, _>>()?)
}
