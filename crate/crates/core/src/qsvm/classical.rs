//! Classical soft-margin SVM dual over the probability simplex, used as an
//! oracle for the variational model.

use crate::dataset::Label;
use crate::sim::Statevector;
use crate::{Error, Result};

/// Convergence threshold on the largest coordinate change per step.
pub const TOLERANCE: f64 = 1e-8;
const MAX_ITERATIONS: usize = 1_000_000;

#[derive(Debug, Clone, PartialEq)]
pub struct ClassicalSvm {
    pub mu: Vec<f64>,
    pub labels: Vec<Label>,
    pub lambda: f64,
    points: Vec<Vec<f64>>,
}

/// Euclidean projection onto `{μ ≥ 0, Σμ = 1}`.
pub fn project_simplex(v: &[f64]) -> Vec<f64> {
    let mut u = v.to_vec();
    u.sort_by(|a, b| b.total_cmp(a));
    let mut cum = 0.0;
    let mut tau = 0.0;
    for (k, &x) in u.iter().enumerate() {
        cum += x;
        let t = (cum - 1.0) / (k + 1) as f64;
        if x - t > 0.0 {
            tau = t;
        }
    }
    v.iter().map(|x| (x - tau).max(0.0)).collect()
}

/// Minimises `½ Σ y_i y_j μ_i μ_j (G_ij + 1/λ) + (1/C) Σ μ_i²` over the
/// simplex by projected gradient.
pub fn solve_dual(gram: &[Vec<f64>], labels: &[Label], c: f64, lambda: f64) -> Result<Vec<f64>> {
    let m = labels.len();
    if m < 2 {
        return Err(Error::EmptyTraining);
    }
    if gram.len() != m || gram.iter().any(|r| r.len() != m) {
        return Err(Error::DimensionMismatch { left: m, right: gram.len() });
    }
    if labels.iter().all(|&l| l == labels[0]) {
        return Err(Error::SingleClass);
    }
    if !(c > 0.0 && lambda > 0.0) {
        return Err(Error::Hyperparams(format!("need C > 0 and lambda > 0, got {c}, {lambda}")));
    }
    let y: Vec<f64> = labels.iter().map(|l| l.sign()).collect();
    let q: Vec<Vec<f64>> = (0..m)
        .map(|i| {
            (0..m)
                .map(|j| y[i] * y[j] * (gram[i][j] + 1.0 / lambda) + if i == j { 2.0 / c } else { 0.0 })
                .collect()
        })
        .collect();
    // Gershgorin bound on the Hessian's spectral radius.
    let lipschitz = q.iter().map(|r| r.iter().map(|v| v.abs()).sum::<f64>()).fold(0.0, f64::max);
    let step = 1.0 / lipschitz;

    let mut mu = vec![1.0 / m as f64; m];
    for _ in 0..MAX_ITERATIONS {
        let grad: Vec<f64> = q.iter().map(|r| r.iter().zip(&mu).map(|(a, b)| a * b).sum()).collect();
        let next = project_simplex(&mu.iter().zip(&grad).map(|(x, g)| x - step * g).collect::<Vec<_>>());
        let change = next.iter().zip(&mu).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max);
        mu = next;
        if change < TOLERANCE {
            break;
        }
    }
    Ok(mu)
}

impl ClassicalSvm {
    pub fn fit(points: &[Vec<f64>], labels: &[Label], c: f64, lambda: f64) -> Result<Self> {
        let gram: Vec<Vec<f64>> = points.iter().map(|a| points.iter().map(|b| dot(a, b)).collect()).collect();
        let mu = solve_dual(&gram, labels, c, lambda)?;
        Ok(Self { mu, labels: labels.to_vec(), lambda, points: points.to_vec() })
    }

    /// `Σ μ_i y_i (x_iᵀ a + 1/λ)`.
    pub fn score(&self, a: &[f64]) -> f64 {
        self.points
            .iter()
            .zip(&self.mu)
            .zip(&self.labels)
            .map(|((x, mu), y)| mu * y.sign() * (dot(x, a) + 1.0 / self.lambda))
            .sum()
    }

    pub fn predict(&self, a: &[f64]) -> Label {
        Label::from_score(self.score(a))
    }
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

/// `vec(|ψ⟩⟨ψ|)` as real and imaginary parts, so that the dot product of two
/// feature vectors is `|⟨ψ|φ⟩|²`.
pub fn density_features(state: &Statevector) -> Vec<f64> {
    let a = state.amplitudes();
    let mut re = Vec::with_capacity(a.len() * a.len());
    let mut im = Vec::with_capacity(a.len() * a.len());
    for x in a {
        for y in a {
            let z = x * y.conj();
            re.push(z.re);
            im.push(z.im);
        }
    }
    re.extend(im);
    re
}
