//! Variational quantum SVM.
//!
//! The dual coefficients are the computational-basis probabilities of one
//! shared coefficient circuit, `μ_i(θ) = |⟨i|U(θ)|0…0⟩|²`, so a circuit on
//! `n` qubits carries at most `2^n` training states and `μ` is always
//! nonnegative. Training minimises
//!
//! ```text
//! L(θ) = Σ_ij μ_i μ_j y_i y_j (K_ij + 1/γ) + (1/C) Σ_i μ_i²
//! ```
//!
//! with SPSA, where `K_ij = |⟨ψ_i|ψ_j⟩|²` is computed once per run.

pub mod classical;
mod kernel;
mod model;
mod spsa;

use std::f64::consts::TAU;

use rand::Rng as _;
use serde::{Deserialize, Serialize};

use crate::ansatz::AnsatzTemplate;
use crate::dataset::{DatasetSplit, Label, LabeledState};
use crate::rng::{derive_seed, rng};
use crate::sim::{sample_measurement, Circuit, Statevector};
use crate::{Error, Result};

pub use classical::ClassicalSvm;
pub use kernel::{overlap, KernelMatrix};
pub use model::{Decision, Evaluation, ModelFile, QsvmModel};
pub use spsa::{minimize as spsa_minimize, SpsaConfig, SpsaOutcome};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Hyperparams {
    /// Margin / ridge trade-off.
    pub c: f64,
    /// Kernel offset scale; the offset added to every overlap is `1/gamma`.
    pub gamma: f64,
    /// Shots per estimate; 0 means exact probabilities and overlaps.
    pub shots: u64,
    pub spsa: SpsaConfig,
}

impl Default for Hyperparams {
    fn default() -> Self {
        Self { c: 100.0, gamma: 10.0, shots: 0, spsa: SpsaConfig::default() }
    }
}

impl Hyperparams {
    pub fn validate(&self) -> Result<()> {
        if !(self.c > 0.0 && self.c.is_finite()) {
            return Err(Error::Hyperparams(format!("C must be positive, got {}", self.c)));
        }
        if !(self.gamma > 0.0 && self.gamma.is_finite()) {
            return Err(Error::Hyperparams(format!("gamma must be positive, got {}", self.gamma)));
        }
        self.spsa.validate()
    }
}

/// First `m` basis probabilities of `circuit` at `theta`; sampled
/// frequencies when `shots > 0`.
pub fn mu_vector(circuit: &Circuit, theta: &[f64], m: usize, shots: u64, seed: u64) -> Result<Vec<f64>> {
    let dim = 1usize << circuit.n_qubits();
    if m > dim {
        return Err(Error::Capacity { m, capacity: dim });
    }
    let state = circuit.run(theta)?;
    let mut probs = if shots == 0 {
        state.probabilities()
    } else {
        let counts = sample_measurement(&state, shots, seed)?;
        counts.iter().map(|&c| c as f64 / shots as f64).collect()
    };
    probs.truncate(m);
    Ok(probs)
}

/// The variational dual loss. Requires `mu`, `labels` and `kernel` of equal size.
pub fn quantum_loss(mu: &[f64], labels: &[Label], kernel: &KernelMatrix, c: f64, gamma: f64) -> f64 {
    let v: Vec<f64> = mu.iter().zip(labels).map(|(m, y)| m * y.sign()).collect();
    let quad: f64 = (0..v.len())
        .map(|i| v[i] * kernel.row(i).iter().zip(&v).map(|(k, vj)| k * vj).sum::<f64>())
        .sum();
    let offset = v.iter().sum::<f64>().powi(2) / gamma;
    let ridge = mu.iter().map(|m| m * m).sum::<f64>() / c;
    quad + offset + ridge
}

/// `Σ_i μ_i y_i (overlap_i + 1/γ)`.
pub fn decision_score(mu: &[f64], labels: &[Label], overlaps: &[f64], gamma: f64) -> f64 {
    mu.iter()
        .zip(labels)
        .zip(overlaps)
        .map(|((m, y), k)| m * y.sign() * (k + 1.0 / gamma))
        .sum()
}

/// A trained model together with its per-iteration loss trace.
#[derive(Debug, Clone, PartialEq)]
pub struct TrainOutcome {
    pub model: QsvmModel,
    pub trace: Vec<f64>,
}

fn check_training_set(train: &[LabeledState], capacity: usize) -> Result<()> {
    if train.is_empty() {
        return Err(Error::EmptyTraining);
    }
    if train.len() > capacity {
        return Err(Error::Capacity { m: train.len(), capacity });
    }
    if train.iter().all(|s| s.label == train[0].label) {
        return Err(Error::SingleClass);
    }
    for s in train {
        train[0].state.check_same_size(&s.state)?;
    }
    Ok(())
}

/// Trains the coefficient circuit `template` on `split.train`.
///
/// The initial parameters are uniform on `[0, 2π)`; the returned `θ*` is the
/// lowest-loss iterate, so its loss never exceeds the initial one.
pub fn train(split: &DatasetSplit, template: &AnsatzTemplate, hyper: &Hyperparams, seed: u64) -> Result<TrainOutcome> {
    hyper.validate()?;
    let circuit = template.build()?;
    check_training_set(&split.train, 1 << circuit.n_qubits())?;
    let m = split.train.len();
    let states: Vec<&Statevector> = split.train.iter().map(|s| &s.state).collect();
    let labels: Vec<Label> = split.train.iter().map(|s| s.label).collect();
    let kernel = if hyper.shots == 0 {
        KernelMatrix::exact(&states)?
    } else {
        KernelMatrix::swap_test(&states, hyper.shots, derive_seed(seed, 1))?
    };

    let mut init_rng = rng(derive_seed(seed, 2));
    let theta0: Vec<f64> = (0..circuit.n_params()).map(|_| init_rng.random::<f64>() * TAU).collect();
    let mu_seed = derive_seed(seed, 3);
    let loss = |theta: &[f64], eval: u64| {
        let mu = mu_vector(&circuit, theta, m, hyper.shots, derive_seed(mu_seed, eval))?;
        Ok(quantum_loss(&mu, &labels, &kernel, hyper.c, hyper.gamma))
    };
    let outcome = spsa::minimize(loss, theta0, &hyper.spsa, derive_seed(seed, 4))?;

    let mu_star = mu_vector(&circuit, &outcome.best, m, hyper.shots, derive_seed(seed, 5))?;
    let model = QsvmModel {
        circuit_id: template.id.clone(),
        n_blocks: template.n_blocks,
        mu_circuit: circuit,
        theta_star: outcome.best,
        mu_star,
        train: split.train.clone(),
        train_seed: split.seed,
        hyper: *hyper,
        kernel,
        initial_loss: outcome.initial_loss,
        final_loss: outcome.best_loss,
    };
    Ok(TrainOutcome { model, trace: outcome.trace })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ansatz::Registry;
    use crate::dataset::{make_split, Regime, SplitPlan};

    fn split() -> DatasetSplit {
        make_split(&SplitPlan::new(Regime::TwoQubitPartial, 4, 10), 21).unwrap()
    }

    #[test]
    fn hand_case() {
        let k = KernelMatrix::from_rows(vec![vec![1.0, 0.0], vec![0.0, 1.0]]).unwrap();
        // Diagonal 2 x 0.25 x 1.1, off-diagonal -2 x 0.25 x 0.1, ridge 0.5.
        let l = quantum_loss(&[0.5, 0.5], &[Label::Separable, Label::Entangled], &k, 1.0, 10.0);
        assert!((l - 1.0).abs() < 1e-12, "{l}");
        assert_eq!(quantum_loss(&[0.0, 0.0], &[Label::Separable, Label::Entangled], &k, 1.0, 10.0), 0.0);
    }

    #[test]
    fn mu_examples() {
        let fig1 = Registry::builtin().build("fig1", 1).unwrap();
        assert_eq!(mu_vector(&fig1, &[0.0; 4], 4, 0, 0).unwrap(), vec![1.0, 0.0, 0.0, 0.0]);
        // Probabilities well away from 0, where the normal bound applies.
        let theta = [1.2, 1.7, 0.8, 2.0];
        let exact = mu_vector(&fig1, &theta, 4, 0, 0).unwrap();
        assert!(exact.iter().all(|&p| p > 0.01), "{exact:?}");
        assert!((exact.iter().sum::<f64>() - 1.0).abs() < 1e-12);
        let noisy = mu_vector(&fig1, &theta, 4, 8192, 7).unwrap();
        for (p, q) in exact.iter().zip(&noisy) {
            assert!((p - q).abs() <= 4.0 * (p * (1.0 - p) / 8192.0).sqrt() + 1e-12, "{exact:?} {noisy:?}");
        }
        assert!(matches!(mu_vector(&fig1, &theta, 5, 0, 0), Err(Error::Capacity { .. })));
    }

    #[test]
    fn training_is_deterministic_and_never_worse() {
        let t = Registry::builtin().get("fig1").unwrap().clone();
        let hyper = Hyperparams { spsa: SpsaConfig { iterations: 30, ..Default::default() }, ..Default::default() };
        let a = train(&split(), &t, &hyper, 3).unwrap();
        let b = train(&split(), &t, &hyper, 3).unwrap();
        assert_eq!(a, b);
        assert_eq!(a.trace.len(), 30);
        assert!(a.model.final_loss <= a.model.initial_loss);
    }

    #[test]
    fn training_rejects_bad_sets() {
        let t = Registry::builtin().get("fig1").unwrap().clone();
        let hyper = Hyperparams::default();
        let mut s = split();
        s.train.retain(|x| x.label == Label::Separable);
        assert!(matches!(train(&s, &t, &hyper, 0), Err(Error::SingleClass)));
        s.train.clear();
        assert!(matches!(train(&s, &t, &hyper, 0), Err(Error::EmptyTraining)));
        let big = make_split(&SplitPlan { mu_qubits: 3, ..SplitPlan::new(Regime::TwoQubitPartial, 6, 2) }, 0).unwrap();
        assert!(matches!(train(&big, &t, &hyper, 0), Err(Error::Capacity { m: 6, capacity: 4 })));
        let bad = Hyperparams { gamma: 0.0, ..Hyperparams::default() };
        assert!(train(&split(), &t, &bad, 0).is_err());
    }
}
