use std::fs::File;
use std::io::{BufReader, BufWriter, Write};
use std::path::PathBuf;

use anyhow::{bail, Context, Result};
use clap::{Parser, Subcommand};
use qsvm_cli::config::{ExperimentConfig, ExperimentKind};
use qsvm_cli::{experiment, report};
use qsvm_core::ansatz::Registry;
use qsvm_core::dataset::{make_split, read_records, write_records, DatasetRecord, DatasetSplit, Regime, SetKind, SplitPlan};
use qsvm_core::metrics::{MetricsReport, DEFAULT_BINS, DEFAULT_SAMPLES};
use qsvm_core::qsvm::{train, Hyperparams, QsvmModel};

#[derive(Parser)]
#[command(name = "qsvm", version, about = "Quantum SVM entanglement classifier experiments")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Generate a labelled train/test split as JSON lines.
    GenData {
        #[arg(long, default_value = "two_qubit_partial")]
        regime: Regime,
        #[arg(long, default_value_t = 4)]
        m_train: usize,
        #[arg(long, default_value_t = 20)]
        m_test: usize,
        /// Qubits of the coefficient circuit the split is meant for.
        #[arg(long)]
        mu_qubits: Option<usize>,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Train a model on the `train` records of a dataset file.
    Train {
        #[arg(long)]
        data: PathBuf,
        #[arg(long, default_value = "fig1")]
        circuit: String,
        #[arg(long, default_value_t = 1)]
        blocks: usize,
        /// Experiment config whose `hyper` table sets the hyperparameters.
        #[arg(long)]
        config: Option<PathBuf>,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Shots per estimate; 0 means exact.
        #[arg(long)]
        shots: Option<u64>,
        #[arg(long)]
        out: PathBuf,
        /// Write the per-iteration loss here as CSV.
        #[arg(long)]
        trace: Option<PathBuf>,
    },
    /// Classify the `test` records of a dataset file.
    Eval {
        #[arg(long)]
        model: PathBuf,
        #[arg(long)]
        data: PathBuf,
        #[arg(long, default_value_t = 0)]
        shots: u64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Write per-state decisions here as CSV.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Entangling capability and expressibility of templates.
    Metrics {
        #[arg(long, value_delimiter = ',', required = true)]
        circuit: Vec<String>,
        #[arg(long, default_value_t = 1)]
        blocks: usize,
        #[arg(long, default_value_t = DEFAULT_SAMPLES)]
        samples: usize,
        #[arg(long, default_value_t = DEFAULT_BINS)]
        bins: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Run a bundled or user-supplied experiment.
    Reproduce {
        /// Bundled experiment; optional when --config is given.
        experiment: Option<ExperimentKind>,
        #[arg(long)]
        config: Option<PathBuf>,
        /// Comma-separated seeds, replacing the config's list.
        #[arg(long, value_delimiter = ',')]
        seed: Option<Vec<u64>>,
        /// Shots per estimate (0 = exact). For table3 this sets the
        /// shot-noise column instead.
        #[arg(long)]
        shots: Option<u64>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Summarise a finished run directory.
    Report { dir: PathBuf },
}

fn output(path: &Option<PathBuf>) -> Result<Box<dyn Write>> {
    Ok(match path {
        Some(p) => Box::new(BufWriter::new(File::create(p).with_context(|| format!("creating {}", p.display()))?)),
        None => Box::new(std::io::stdout().lock()),
    })
}

fn load_dataset(path: &PathBuf) -> Result<Vec<DatasetRecord>> {
    let f = File::open(path).with_context(|| format!("opening {}", path.display()))?;
    Ok(read_records(BufReader::new(f)).with_context(|| format!("reading {}", path.display()))?)
}

fn main() -> Result<()> {
    let cli = Cli::parse();
    let registry = Registry::from_env()?;
    match cli.command {
        Command::GenData { regime, m_train, m_test, mu_qubits, seed, out } => {
            let mut plan = SplitPlan::new(regime, m_train, m_test);
            if let Some(n) = mu_qubits {
                plan.mu_qubits = n;
            }
            let split = make_split(&plan, seed)?;
            write_records(output(&out)?, &split.records())?;
        }
        Command::Train { data, circuit, blocks, config, seed, shots, out, trace } => {
            let mut hyper = match config {
                Some(p) => ExperimentConfig::load(&p)?.hyper,
                None => Hyperparams::default(),
            };
            if let Some(s) = shots {
                hyper.shots = s;
            }
            let records = load_dataset(&data)?;
            let split = DatasetSplit::from_records(&records)?;
            let template = registry.get(&circuit)?.with_blocks(blocks);
            let outcome = train(&split, &template, &hyper, seed)?;
            std::fs::write(&out, outcome.model.to_json()).with_context(|| format!("writing {}", out.display()))?;
            if let Some(p) = trace {
                let mut w = csv::Writer::from_path(&p)?;
                w.write_record(["iteration", "loss"])?;
                for (k, l) in outcome.trace.iter().enumerate() {
                    w.write_record([(k + 1).to_string(), l.to_string()])?;
                }
                w.flush()?;
            }
            eprintln!(
                "trained {circuit} on {} states: loss {:.6} -> {:.6}",
                split.train.len(),
                outcome.model.initial_loss,
                outcome.model.final_loss
            );
        }
        Command::Eval { model, data, shots, seed, out } => {
            let text = std::fs::read_to_string(&model).with_context(|| format!("reading {}", model.display()))?;
            let model = QsvmModel::from_json(&text, &registry)?;
            let records = load_dataset(&data)?;
            let tagged: Vec<&DatasetRecord> = records.iter().filter(|r| r.set == Some(SetKind::Test)).collect();
            let chosen: Vec<&DatasetRecord> = if tagged.is_empty() { records.iter().collect() } else { tagged };
            if chosen.is_empty() {
                bail!("{} has no records", data.display());
            }
            let test = chosen.iter().map(|r| r.to_state()).collect::<Result<Vec<_>, _>>()?;
            let eval = model.evaluate(&test, shots, seed)?;
            if let Some(p) = out {
                let mut w = csv::Writer::from_path(&p)?;
                w.write_record(["index", "family", "label", "predicted", "score"])?;
                for (i, (s, d)) in test.iter().zip(&eval.decisions).enumerate() {
                    w.write_record([
                        i.to_string(),
                        serde_plain(&s.family),
                        s.label.as_i8().to_string(),
                        d.label.as_i8().to_string(),
                        d.score.to_string(),
                    ])?;
                }
                w.flush()?;
            }
            println!("accuracy {:.4} ({}/{})", eval.accuracy(), eval.correct, eval.total);
        }
        Command::Metrics { circuit, blocks, samples, bins, seed, out } => {
            let mut w = csv::Writer::from_writer(output(&out)?);
            for id in circuit {
                let c = registry.build(&id, blocks)?;
                w.serialize(MetricsReport::compute(&id, &c, samples, bins, seed)?)?;
            }
            w.flush()?;
        }
        Command::Reproduce { experiment, config, seed, shots, out } => {
            let mut cfg = match (config, experiment) {
                (Some(p), kind) => {
                    let c = ExperimentConfig::load(&p)?;
                    if let Some(k) = kind {
                        if k != c.experiment {
                            bail!("{} describes `{}`, not `{}`", p.display(), c.experiment.name(), k.name());
                        }
                    }
                    c
                }
                (None, Some(k)) => k.default_config(),
                (None, None) => bail!("name an experiment or pass --config"),
            };
            if let Some(s) = seed {
                cfg.seeds = s;
            }
            if let Some(s) = shots {
                if cfg.experiment == ExperimentKind::Table3 {
                    cfg.shots.noisy_shots = s;
                } else {
                    cfg.hyper.shots = s;
                }
            }
            let dir = out
                .or_else(|| cfg.output_dir.clone())
                .unwrap_or_else(|| PathBuf::from("results").join(cfg.experiment.name()));
            let summary = experiment::run(&cfg, &registry, &dir)?;
            for f in &summary.files {
                println!("wrote {}", f.display());
            }
            for f in &summary.failures {
                eprintln!("failed: row {} circuit {} seed {}: {}", f.row, f.circuit, f.seed, f.error);
            }
        }
        Command::Report { dir } => print!("{}", report::summarize(&dir)?),
    }
    Ok(())
}

fn serde_plain<T: serde::Serialize>(v: &T) -> String {
    toml::Value::try_from(v).ok().and_then(|v| v.as_str().map(str::to_string)).unwrap_or_default()
}
