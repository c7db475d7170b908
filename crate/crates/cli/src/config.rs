//! Experiment configuration files.

use std::path::{Path, PathBuf};

use anyhow::{bail, ensure, Context};
use qsvm_core::ansatz::Registry;
use qsvm_core::dataset::Regime;
use qsvm_core::metrics::{DEFAULT_BINS, DEFAULT_SAMPLES};
use qsvm_core::qsvm::Hyperparams;
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "snake_case")]
pub enum ExperimentKind {
    /// Accuracy and entangling capability per benchmark circuit.
    Table1,
    /// Accuracy and expressibility per benchmark circuit.
    Table2,
    /// Best-template accuracy per data regime, exact and shot-noise columns.
    Table3,
    /// Per-iteration training loss.
    #[value(name = "loss")]
    LossTrace,
    /// Swap-test estimator variance against shot count.
    ShotScaling,
    /// Train and evaluate the listed circuits on the listed regimes.
    Custom,
}

impl ExperimentKind {
    pub fn name(self) -> &'static str {
        match self {
            ExperimentKind::Table1 => "table1",
            ExperimentKind::Table2 => "table2",
            ExperimentKind::Table3 => "table3",
            ExperimentKind::LossTrace => "loss_trace",
            ExperimentKind::ShotScaling => "shot_scaling",
            ExperimentKind::Custom => "custom",
        }
    }

    /// Configuration shipped with the binary for this experiment.
    pub fn default_config(self) -> ExperimentConfig {
        let text = match self {
            ExperimentKind::Table1 => include_str!("../configs/table1.toml"),
            ExperimentKind::Table2 => include_str!("../configs/table2.toml"),
            ExperimentKind::Table3 => include_str!("../configs/table3.toml"),
            ExperimentKind::LossTrace => include_str!("../configs/loss.toml"),
            ExperimentKind::ShotScaling => include_str!("../configs/shot_scaling.toml"),
            ExperimentKind::Custom => include_str!("../configs/custom.toml"),
        };
        ExperimentConfig::parse(text).expect("bundled config is valid")
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct DatasetPlan {
    pub regimes: Vec<Regime>,
    pub m_train: usize,
    pub m_test: usize,
}

impl Default for DatasetPlan {
    fn default() -> Self {
        Self { regimes: vec![Regime::TwoQubitPartial], m_train: 4, m_test: 20 }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct MetricsPlan {
    pub n_samples: usize,
    pub n_bins: usize,
}

impl Default for MetricsPlan {
    fn default() -> Self {
        Self { n_samples: DEFAULT_SAMPLES, n_bins: DEFAULT_BINS }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ShotPlan {
    /// Shots for the shot-noise column of table3.
    pub noisy_shots: u64,
    /// Shot counts swept by shot_scaling.
    pub sweep: Vec<u64>,
    /// Independent estimates per shot count in shot_scaling.
    pub repetitions: usize,
}

impl Default for ShotPlan {
    fn default() -> Self {
        Self { noisy_shots: 8192, sweep: vec![512, 1024, 2048, 4096, 8192], repetitions: 200 }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub experiment: ExperimentKind,
    /// Templates to run; empty selects the experiment's default set.
    #[serde(default)]
    pub circuit_ids: Vec<String>,
    /// Block repetitions applied to every template.
    #[serde(default = "one")]
    pub n_blocks: usize,
    pub seeds: Vec<u64>,
    /// Where artifacts go. Not written to manifests, so a rerun elsewhere
    /// reproduces the manifest byte for byte.
    #[serde(default, skip_serializing)]
    pub output_dir: Option<PathBuf>,
    #[serde(default)]
    pub dataset: DatasetPlan,
    #[serde(default)]
    pub hyper: Hyperparams,
    #[serde(default)]
    pub metrics: MetricsPlan,
    #[serde(default)]
    pub shots: ShotPlan,
}

fn one() -> usize {
    1
}

impl ExperimentConfig {
    pub fn parse(text: &str) -> anyhow::Result<Self> {
        Ok(toml::from_str(text)?)
    }

    pub fn load(path: &Path) -> anyhow::Result<Self> {
        let text = std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
        Self::parse(&text).with_context(|| format!("parsing {}", path.display()))
    }

    pub fn to_toml(&self) -> String {
        toml::to_string(self).expect("config serialises")
    }

    /// Templates this run will use for `regime`, in registry order.
    pub fn circuits_for(&self, registry: &Registry, regime: Regime) -> Vec<String> {
        let n = regime.n_qubits();
        match self.experiment {
            ExperimentKind::Table1 | ExperimentKind::Table2 if self.circuit_ids.is_empty() => {
                registry.benchmarks().map(|t| t.id.clone()).collect()
            }
            ExperimentKind::LossTrace if self.circuit_ids.is_empty() => vec!["fig1".to_string()],
            _ if self.circuit_ids.is_empty() => registry.with_qubits(n).map(|t| t.id.clone()).collect(),
            _ => self
                .circuit_ids
                .iter()
                .filter(|id| registry.get(id).is_ok_and(|t| t.n_qubits == n))
                .cloned()
                .collect(),
        }
    }

    pub fn validate(&self, registry: &Registry) -> anyhow::Result<()> {
        ensure!(!self.seeds.is_empty(), "`seeds` must list at least one seed");
        ensure!(self.n_blocks >= 1, "`n_blocks` must be at least 1");
        for id in &self.circuit_ids {
            registry.get(id).with_context(|| format!("circuit `{id}` is not in the template registry"))?;
        }
        self.hyper.validate()?;
        if self.experiment == ExperimentKind::ShotScaling {
            ensure!(!self.shots.sweep.is_empty(), "`shots.sweep` is empty");
            ensure!(self.shots.sweep.iter().all(|&s| s > 0), "`shots.sweep` entries must be positive");
            ensure!(self.shots.repetitions >= 2, "`shots.repetitions` must be at least 2");
            return Ok(());
        }
        ensure!(!self.dataset.regimes.is_empty(), "`dataset.regimes` is empty");
        ensure!(self.dataset.m_train >= 2, "`dataset.m_train` must be at least 2");
        if matches!(self.experiment, ExperimentKind::Table1 | ExperimentKind::Table2) {
            ensure!(
                self.metrics.n_samples >= 1000 && self.metrics.n_bins >= 10,
                "metrics need n_samples >= 1000 and n_bins >= 10"
            );
        }
        if self.experiment == ExperimentKind::Table3 {
            ensure!(self.shots.noisy_shots > 0, "`shots.noisy_shots` must be positive");
        }
        for &regime in &self.dataset.regimes {
            let ids = self.circuits_for(registry, regime);
            if ids.is_empty() {
                bail!("no selected circuit acts on {} qubits (regime {regime})", regime.n_qubits());
            }
            for id in ids {
                let t = registry.get(&id)?;
                let capacity = 1usize << t.n_qubits;
                ensure!(
                    self.dataset.m_train <= capacity,
                    "m_train = {} exceeds the {capacity} coefficients of `{id}`",
                    self.dataset.m_train
                );
            }
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn bundled_configs_validate() {
        let reg = Registry::builtin();
        for kind in [
            ExperimentKind::Table1,
            ExperimentKind::Table2,
            ExperimentKind::Table3,
            ExperimentKind::LossTrace,
            ExperimentKind::ShotScaling,
            ExperimentKind::Custom,
        ] {
            let c = kind.default_config();
            assert_eq!(c.experiment, kind);
            c.validate(&reg).unwrap();
            assert_eq!(c.seeds.len(), 5);
        }
    }

    #[test]
    fn toml_round_trip_drops_output_dir() {
        let mut c = ExperimentKind::Table3.default_config();
        c.output_dir = Some("somewhere".into());
        let text = c.to_toml();
        assert!(!text.contains("somewhere"));
        let back = ExperimentConfig::parse(&text).unwrap();
        assert_eq!(back, ExperimentConfig { output_dir: None, ..c });
        assert_eq!(back.to_toml(), text);
    }

    #[test]
    fn invalid_configs() {
        let reg = Registry::builtin();
        let mut c = ExperimentKind::Table1.default_config();
        c.circuit_ids = vec!["C99".into()];
        assert!(c.validate(&reg).is_err());
        let mut c = ExperimentKind::Table1.default_config();
        c.seeds.clear();
        assert!(c.validate(&reg).is_err());
        let mut c = ExperimentKind::Custom.default_config();
        c.dataset.m_train = 8;
        assert!(c.validate(&reg).is_err());
        assert!(ExperimentConfig::parse("experiment = \"table1\"\nseeds = [1]\nbogus = 2\n").is_err());
    }

    #[test]
    fn default_circuit_sets() {
        let reg = Registry::builtin();
        let t1 = ExperimentKind::Table1.default_config();
        assert_eq!(t1.circuits_for(&reg, Regime::TwoQubitPartial).len(), 19);
        let t3 = ExperimentKind::Table3.default_config();
        assert_eq!(t3.circuits_for(&reg, Regime::ThreeQubitGhz).len(), 4);
        assert_eq!(t3.circuits_for(&reg, Regime::TwoQubitMaximal).len(), 20);
        let loss = ExperimentKind::LossTrace.default_config();
        assert_eq!(loss.circuits_for(&reg, Regime::TwoQubitPartial), vec!["fig1"]);
    }
}
