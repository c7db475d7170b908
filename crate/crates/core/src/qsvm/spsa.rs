use rand::Rng as _;
use serde::{Deserialize, Serialize};

use crate::rng::rng;
use crate::{Error, Result};

/// Gain schedule `a_k = a / (k + 1 + A)^α`, `c_k = c / (k + 1)^γ`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SpsaConfig {
    pub iterations: usize,
    pub a: f64,
    pub c: f64,
    pub stability: f64,
    pub alpha: f64,
    pub gamma: f64,
}

impl Default for SpsaConfig {
    fn default() -> Self {
        Self { iterations: 200, a: 0.2, c: 0.1, stability: 10.0, alpha: 0.602, gamma: 0.101 }
    }
}

impl SpsaConfig {
    pub fn validate(&self) -> Result<()> {
        if self.iterations == 0 {
            return Err(Error::Hyperparams("SPSA needs at least one iteration".into()));
        }
        let gains = [self.a, self.c, self.alpha, self.gamma];
        if gains.iter().any(|g| !g.is_finite() || *g <= 0.0) || !(self.stability >= 0.0) {
            return Err(Error::Hyperparams(format!("invalid SPSA gains {self:?}")));
        }
        Ok(())
    }

    pub fn step_size(&self, k: usize) -> f64 {
        self.a / (k as f64 + 1.0 + self.stability).powf(self.alpha)
    }

    pub fn perturbation(&self, k: usize) -> f64 {
        self.c / (k as f64 + 1.0).powf(self.gamma)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SpsaOutcome {
    /// Lowest-loss iterate seen, the starting point included.
    pub best: Vec<f64>,
    pub best_loss: f64,
    pub initial_loss: f64,
    /// Loss of the iterate after each update.
    pub trace: Vec<f64>,
}

/// Minimises `loss` from `theta0` with Rademacher perturbations drawn from
/// `seed`. `loss` receives an evaluation counter so noisy objectives can
/// derive their own seeds.
pub fn minimize<F>(mut loss: F, theta0: Vec<f64>, config: &SpsaConfig, seed: u64) -> Result<SpsaOutcome>
where
    F: FnMut(&[f64], u64) -> Result<f64>,
{
    config.validate()?;
    let mut rng = rng(seed);
    let mut evals = 0u64;
    let mut eval = |theta: &[f64]| {
        evals += 1;
        loss(theta, evals - 1)
    };

    let mut theta = theta0;
    let initial_loss = eval(&theta)?;
    let mut best = theta.clone();
    let mut best_loss = initial_loss;
    let mut trace = Vec::with_capacity(config.iterations);
    let p = theta.len();

    for k in 0..config.iterations {
        let (ak, ck) = (config.step_size(k), config.perturbation(k));
        let delta: Vec<f64> = (0..p).map(|_| if rng.random::<bool>() { 1.0 } else { -1.0 }).collect();
        let plus: Vec<f64> = theta.iter().zip(&delta).map(|(t, d)| t + ck * d).collect();
        let minus: Vec<f64> = theta.iter().zip(&delta).map(|(t, d)| t - ck * d).collect();
        let diff = (eval(&plus)? - eval(&minus)?) / (2.0 * ck);
        for (t, d) in theta.iter_mut().zip(&delta) {
            *t -= ak * diff * d;
        }
        let l = eval(&theta)?;
        trace.push(l);
        if l < best_loss {
            best_loss = l;
            best.clone_from(&theta);
        }
    }
    Ok(SpsaOutcome { best, best_loss, initial_loss, trace })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn default_gains() {
        let c = SpsaConfig::default();
        assert_eq!(c.iterations, 200);
        assert!((c.step_size(0) - 0.2 / 11f64.powf(0.602)).abs() < 1e-15);
        assert!((c.perturbation(0) - 0.1).abs() < 1e-15);
        assert!(SpsaConfig { iterations: 0, ..c }.validate().is_err());
        assert!(SpsaConfig { a: -1.0, ..c }.validate().is_err());
    }

    #[test]
    fn minimises_a_quadratic() {
        let target = [0.5, -1.0, 2.0];
        let f = |x: &[f64], _| Ok(x.iter().zip(target).map(|(a, b)| (a - b).powi(2)).sum::<f64>());
        let cfg = SpsaConfig { iterations: 2000, a: 0.5, ..Default::default() };
        let out = minimize(f, vec![0.0; 3], &cfg, 1).unwrap();
        assert!(out.best_loss < 1e-3, "{}", out.best_loss);
        assert_eq!(out.trace.len(), 2000);
        assert!(out.best_loss <= out.initial_loss);
    }

    #[test]
    fn seeded_runs_repeat() {
        let f = |x: &[f64], _| Ok(x[0].sin() + x[1].cos());
        let cfg = SpsaConfig::default();
        let a = minimize(f, vec![1.0, 1.0], &cfg, 5).unwrap();
        let b = minimize(f, vec![1.0, 1.0], &cfg, 5).unwrap();
        assert_eq!(a, b);
    }
}
