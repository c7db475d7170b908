use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::{decision_score, overlap, Hyperparams, KernelMatrix};
use crate::ansatz::Registry;
use crate::dataset::{DatasetRecord, Label, LabeledState, SetKind};
use crate::rng::derive_seed;
use crate::sim::{Circuit, Statevector};
use crate::{Error, Result};

/// A trained variational SVM. Immutable once built.
#[derive(Debug, Clone, PartialEq)]
pub struct QsvmModel {
    pub circuit_id: String,
    pub n_blocks: usize,
    pub mu_circuit: Circuit,
    pub theta_star: Vec<f64>,
    /// Coefficients at `theta_star`, one per training state.
    pub mu_star: Vec<f64>,
    pub train: Vec<LabeledState>,
    /// Seed of the split the training states came from.
    pub train_seed: u64,
    pub hyper: Hyperparams,
    pub kernel: KernelMatrix,
    pub initial_loss: f64,
    pub final_loss: f64,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Decision {
    pub label: Label,
    pub score: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Evaluation {
    pub decisions: Vec<Decision>,
    pub correct: usize,
    pub total: usize,
}

impl Evaluation {
    pub fn accuracy(&self) -> f64 {
        if self.total == 0 {
            return 0.0;
        }
        self.correct as f64 / self.total as f64
    }
}

impl QsvmModel {
    pub fn labels(&self) -> Vec<Label> {
        self.train.iter().map(|s| s.label).collect()
    }

    /// Classifies `state` using exact overlaps (`shots == 0`) or swap tests.
    pub fn decide(&self, state: &Statevector, shots: u64, seed: u64) -> Result<Decision> {
        let overlaps = self
            .train
            .iter()
            .enumerate()
            .map(|(i, s)| overlap(&s.state, state, shots, derive_seed(seed, i as u64)))
            .collect::<Result<Vec<_>>>()?;
        let score = decision_score(&self.mu_star, &self.labels(), &overlaps, self.hyper.gamma);
        Ok(Decision { label: Label::from_score(score), score })
    }

    /// Decides every test state in parallel; state `k` uses sub-seed `k`.
    pub fn evaluate(&self, test: &[LabeledState], shots: u64, seed: u64) -> Result<Evaluation> {
        let decisions: Vec<Decision> = test
            .par_iter()
            .enumerate()
            .map(|(k, s)| self.decide(&s.state, shots, derive_seed(seed, k as u64)))
            .collect::<Result<_>>()?;
        let correct = decisions.iter().zip(test).filter(|(d, s)| d.label == s.label).count();
        Ok(Evaluation { decisions, correct, total: test.len() })
    }

    pub fn to_file(&self) -> ModelFile {
        ModelFile {
            circuit_id: self.circuit_id.clone(),
            n_blocks: self.n_blocks,
            theta_star: self.theta_star.clone(),
            mu_star: self.mu_star.clone(),
            hyper: self.hyper,
            train: self
                .train
                .iter()
                .map(|s| DatasetRecord::from_state(s, self.train_seed, Some(SetKind::Train)))
                .collect(),
            kernel: self.kernel.clone(),
            initial_loss: self.initial_loss,
            final_loss: self.final_loss,
        }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(&self.to_file()).expect("model serialises")
    }

    /// Parses a model written by [`QsvmModel::to_json`], rebuilding the
    /// circuit from `registry` and the states from their records.
    pub fn from_json(text: &str, registry: &Registry) -> Result<Self> {
        let file: ModelFile = serde_json::from_str(text).map_err(|e| Error::Parse(e.to_string()))?;
        file.into_model(registry)
    }
}

/// Serialised form of a [`QsvmModel`].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ModelFile {
    pub circuit_id: String,
    pub n_blocks: usize,
    pub theta_star: Vec<f64>,
    pub mu_star: Vec<f64>,
    pub hyper: Hyperparams,
    pub train: Vec<DatasetRecord>,
    pub kernel: KernelMatrix,
    pub initial_loss: f64,
    pub final_loss: f64,
}

impl ModelFile {
    pub fn into_model(self, registry: &Registry) -> Result<QsvmModel> {
        let mu_circuit = registry.build(&self.circuit_id, self.n_blocks)?;
        if self.theta_star.len() != mu_circuit.n_params() {
            return Err(Error::ParamCount { expected: mu_circuit.n_params(), got: self.theta_star.len() });
        }
        let m = self.train.len();
        if self.mu_star.len() != m || self.kernel.m() != m {
            return Err(Error::Parse(format!(
                "{m} training records but {} coefficients and a {}x{} kernel",
                self.mu_star.len(),
                self.kernel.m(),
                self.kernel.m()
            )));
        }
        let train = self.train.iter().map(|r| r.to_state()).collect::<Result<Vec<_>>>()?;
        Ok(QsvmModel {
            circuit_id: self.circuit_id,
            n_blocks: self.n_blocks,
            mu_circuit,
            theta_star: self.theta_star,
            mu_star: self.mu_star,
            train,
            train_seed: self.train.first().map_or(0, |r| r.seed),
            hyper: self.hyper,
            kernel: self.kernel,
            initial_loss: self.initial_loss,
            final_loss: self.final_loss,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dataset::{make_split, Regime, SplitPlan};
    use crate::qsvm::{train, SpsaConfig};

    fn model() -> QsvmModel {
        let split = make_split(&SplitPlan::new(Regime::TwoQubitMaximal, 4, 8), 2).unwrap();
        let t = Registry::builtin().get("fig1").unwrap().clone();
        let hyper = Hyperparams { spsa: SpsaConfig { iterations: 20, ..Default::default() }, ..Default::default() };
        train(&split, &t, &hyper, 9).unwrap().model
    }

    #[test]
    fn json_round_trip() {
        let m = model();
        let text = m.to_json();
        let back = QsvmModel::from_json(&text, &Registry::builtin()).unwrap();
        assert_eq!(back, m);
        assert_eq!(back.to_json(), text);
    }

    #[test]
    fn corrupt_model_is_rejected() {
        let mut file = model().to_file();
        file.theta_star.pop();
        assert!(file.into_model(&Registry::builtin()).is_err());
        assert!(QsvmModel::from_json("{}", &Registry::builtin()).is_err());
    }

    #[test]
    fn dominant_coefficient_decides() {
        let mut m = model();
        let idx = m.train.iter().position(|s| s.label == Label::Separable).unwrap();
        m.mu_star = vec![0.0; m.train.len()];
        m.mu_star[idx] = 1.0;
        let d = m.decide(&m.train[idx].state.clone(), 0, 0).unwrap();
        assert_eq!(d.label, Label::Separable);
        assert!(d.score > 1.0);
    }

    #[test]
    fn zero_score_is_separable() {
        let mut m = model();
        m.mu_star = vec![0.0; m.train.len()];
        let d = m.decide(&m.train[0].state.clone(), 0, 0).unwrap();
        assert_eq!(d.score, 0.0);
        assert_eq!(d.label, Label::Separable);
    }

    #[test]
    fn evaluation_counts() {
        let m = model();
        let test = make_split(&SplitPlan::new(Regime::TwoQubitMaximal, 4, 8), 2).unwrap().test;
        let e = m.evaluate(&test, 0, 0).unwrap();
        assert_eq!(e.total, 8);
        assert_eq!(e, m.evaluate(&test, 0, 0).unwrap());
        let noisy = m.evaluate(&test, 1024, 4).unwrap();
        assert_eq!(noisy, m.evaluate(&test, 1024, 4).unwrap());
        let wrong = make_split(&SplitPlan::new(Regime::ThreeQubitGhz, 4, 2), 2).unwrap().test;
        assert!(m.evaluate(&wrong, 0, 0).is_err());
    }
}
