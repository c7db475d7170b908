//! Entangling capability and expressibility of parameterised circuits.

use std::f64::consts::TAU;

use rand::Rng as _;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::rng::{derive_seed, rng, Rng};
use crate::sim::{fidelity, Circuit, Statevector};
use crate::{Error, Result};

/// Default number of fidelity pairs / entanglement samples.
pub const DEFAULT_SAMPLES: usize = 5000;
/// Default histogram resolution for expressibility.
pub const DEFAULT_BINS: usize = 75;
/// Floor applied to empty empirical bins before taking logarithms.
pub const KL_FLOOR: f64 = 1e-12;

/// Meyer-Wallach `Q = 2 (1 - (1/n) Σ_k tr ρ_k²)`.
pub fn meyer_wallach_q(state: &Statevector) -> Result<f64> {
    let n = state.n_qubits();
    if n < 2 {
        return Err(Error::InvalidSubsystem(format!("Meyer-Wallach Q needs at least 2 qubits, got {n}")));
    }
    let mut purity_sum = 0.0;
    for k in 0..n {
        purity_sum += state.subsystem_purity(&[k])?;
    }
    Ok((2.0 * (1.0 - purity_sum / n as f64)).clamp(0.0, 1.0))
}

fn uniform_params(rng: &mut Rng, n: usize) -> Vec<f64> {
    (0..n).map(|_| rng.random::<f64>() * TAU).collect()
}

fn mean_and_variance(xs: &[f64]) -> (f64, f64) {
    let n = xs.len() as f64;
    let mean = xs.iter().sum::<f64>() / n;
    let var = if xs.len() > 1 {
        xs.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (n - 1.0)
    } else {
        0.0
    };
    (mean, var)
}

/// Q of the circuit output at `n_samples` uniform parameter vectors, in
/// draw order.
pub fn entangling_samples(circuit: &Circuit, n_samples: usize, seed: u64) -> Result<Vec<f64>> {
    if circuit.n_qubits() < 2 {
        return Err(Error::InvalidCircuit("entangling capability needs at least 2 qubits".into()));
    }
    if n_samples < 100 {
        return Err(Error::Domain(format!("n_samples = {n_samples} is below 100")));
    }
    let mut rng = rng(derive_seed(seed, 0x45_43));
    let draws: Vec<Vec<f64>> = (0..n_samples).map(|_| uniform_params(&mut rng, circuit.n_params())).collect();
    draws
        .par_iter()
        .map(|p| meyer_wallach_q(&circuit.run(p)?))
        .collect()
}

/// Mean Meyer-Wallach Q over uniformly sampled parameters.
pub fn entangling_capability(circuit: &Circuit, n_samples: usize, seed: u64) -> Result<f64> {
    let qs = entangling_samples(circuit, n_samples, seed)?;
    Ok(mean_and_variance(&qs).0)
}

/// Per-bin Haar fidelity mass for `n_bins` equal bins on `[0, 1]`.
pub fn haar_bin_masses(n_bins: usize, dim: usize) -> Vec<f64> {
    let power = (dim - 1) as i32;
    (0..n_bins)
        .map(|b| {
            let lo = b as f64 / n_bins as f64;
            let hi = (b + 1) as f64 / n_bins as f64;
            (1.0 - lo).powi(power) - (1.0 - hi).powi(power)
        })
        .collect()
}

/// Fidelities drawn from the Haar distribution on dimension `dim` by
/// inverse CDF, `F = 1 - u^{1/(dim-1)}`.
pub fn haar_fidelity_samples(dim: usize, n: usize, seed: u64) -> Vec<f64> {
    let mut rng = rng(seed);
    let exponent = 1.0 / (dim - 1) as f64;
    (0..n).map(|_| 1.0 - rng.random::<f64>().powf(exponent)).collect()
}

/// Equal-width histogram of fidelities on `[0, 1]`, as probabilities.
pub fn fidelity_histogram(samples: &[f64], n_bins: usize) -> Vec<f64> {
    let mut counts = vec![0usize; n_bins];
    for &f in samples {
        let b = ((f.clamp(0.0, 1.0) * n_bins as f64) as usize).min(n_bins - 1);
        counts[b] += 1;
    }
    counts.iter().map(|&c| c as f64 / samples.len() as f64).collect()
}

/// KL divergence of the fidelity histogram from the Haar distribution on a
/// `dim`-dimensional space. Result is clamped at 0; the floor on empty bins
/// can otherwise push it a hair below.
pub fn kl_from_fidelities(samples: &[f64], n_bins: usize, dim: usize) -> Result<f64> {
    if samples.is_empty() {
        return Err(Error::Domain("no fidelity samples".into()));
    }
    if n_bins == 0 || dim < 2 {
        return Err(Error::Domain(format!("need n_bins >= 1 and dim >= 2, got {n_bins}, {dim}")));
    }
    let p = fidelity_histogram(samples, n_bins);
    let q = haar_bin_masses(n_bins, dim);
    let kl: f64 = p
        .iter()
        .zip(&q)
        .map(|(&p, &q)| {
            let p = p.max(KL_FLOOR);
            p * (p / q).ln()
        })
        .sum();
    Ok(kl.max(0.0))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Expressibility {
    pub kl: f64,
    pub fidelity_mean: f64,
    pub fidelity_variance: f64,
    pub n_pairs: usize,
    pub n_bins: usize,
}

/// Fidelities between outputs at independent uniform parameter pairs.
pub fn fidelity_samples(circuit: &Circuit, n_pairs: usize, seed: u64) -> Result<Vec<f64>> {
    let mut rng = rng(derive_seed(seed, 0x4b_4c));
    let n = circuit.n_params();
    let draws: Vec<(Vec<f64>, Vec<f64>)> = (0..n_pairs)
        .map(|_| (uniform_params(&mut rng, n), uniform_params(&mut rng, n)))
        .collect();
    draws
        .par_iter()
        .map(|(a, b)| fidelity(&circuit.run(a)?, &circuit.run(b)?))
        .collect()
}

pub fn expressibility(circuit: &Circuit, n_pairs: usize, n_bins: usize, seed: u64) -> Result<Expressibility> {
    if n_pairs < 1000 {
        return Err(Error::Domain(format!("n_pairs = {n_pairs} is below 1000")));
    }
    if n_bins < 10 {
        return Err(Error::Domain(format!("n_bins = {n_bins} is below 10")));
    }
    let fs = fidelity_samples(circuit, n_pairs, seed)?;
    let kl = kl_from_fidelities(&fs, n_bins, 1 << circuit.n_qubits())?;
    let (fidelity_mean, fidelity_variance) = mean_and_variance(&fs);
    Ok(Expressibility { kl, fidelity_mean, fidelity_variance, n_pairs, n_bins })
}

/// Both metrics for one circuit. `q_*` summarise the Meyer-Wallach samples,
/// `fidelity_*` the expressibility pair fidelities.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MetricsReport {
    pub circuit_id: String,
    pub entangling_capability: f64,
    pub q_variance: f64,
    pub expressibility_kl: f64,
    pub fidelity_mean: f64,
    pub fidelity_variance: f64,
    pub n_samples: usize,
    pub n_bins: usize,
    pub seed: u64,
}

impl MetricsReport {
    pub fn compute(circuit_id: &str, circuit: &Circuit, n_samples: usize, n_bins: usize, seed: u64) -> Result<Self> {
        let qs = entangling_samples(circuit, n_samples, seed)?;
        let (ec, q_variance) = mean_and_variance(&qs);
        let ex = expressibility(circuit, n_samples, n_bins, seed)?;
        Ok(Self {
            circuit_id: circuit_id.to_string(),
            entangling_capability: ec,
            q_variance,
            expressibility_kl: ex.kl,
            fidelity_mean: ex.fidelity_mean,
            fidelity_variance: ex.fidelity_variance,
            n_samples,
            n_bins,
            seed,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ansatz::Registry;
    use crate::sim::GateKind;
    use num_complex::Complex64;

    fn bell() -> Statevector {
        let h = std::f64::consts::FRAC_1_SQRT_2;
        Statevector::from_amplitudes(vec![h.into(), 0.0.into(), 0.0.into(), h.into()]).unwrap()
    }

    #[test]
    fn analytic_q_values() {
        assert_eq!(meyer_wallach_q(&Statevector::zero(2)).unwrap(), 0.0);
        assert!((meyer_wallach_q(&bell()).unwrap() - 1.0).abs() < 1e-12);
        let mut ghz = vec![Complex64::new(0.0, 0.0); 8];
        ghz[0] = std::f64::consts::FRAC_1_SQRT_2.into();
        ghz[7] = std::f64::consts::FRAC_1_SQRT_2.into();
        let ghz = Statevector::from_amplitudes(ghz).unwrap();
        assert!((meyer_wallach_q(&ghz).unwrap() - 1.0).abs() < 1e-12);
        assert!(meyer_wallach_q(&Statevector::zero(1)).is_err());
    }

    #[test]
    fn fixed_bell_circuit_has_capability_one() {
        let c = Circuit::builder(2).gate(GateKind::H, &[0]).gate(GateKind::CNOT, &[0, 1]).build().unwrap();
        let ec = entangling_capability(&c, 100, 0).unwrap();
        assert!((ec - 1.0).abs() < 1e-12);
    }

    #[test]
    fn c1_has_zero_capability() {
        let c1 = Registry::builtin().build("C1", 1).unwrap();
        assert!(entangling_capability(&c1, 200, 4).unwrap() < 1e-10);
    }

    #[test]
    fn capability_rejects_bad_input() {
        let c1 = Registry::builtin().build("C1", 1).unwrap();
        assert!(entangling_capability(&c1, 99, 0).is_err());
        let one = Circuit::builder(1).param(GateKind::RY, &[0]).build().unwrap();
        assert!(entangling_capability(&one, 100, 0).is_err());
    }

    #[test]
    fn haar_masses_sum_to_one() {
        for dim in [2, 4, 8] {
            let s: f64 = haar_bin_masses(75, dim).iter().sum();
            assert!((s - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn haar_self_test() {
        let fs = haar_fidelity_samples(4, 5000, 1);
        let kl = kl_from_fidelities(&fs, 75, 4).unwrap();
        assert!(kl < 0.01, "{kl}");
    }

    #[test]
    fn idle_circuit_is_inexpressive() {
        let idle = Circuit::empty(1).unwrap();
        let ex = expressibility(&idle, 1000, 75, 0).unwrap();
        assert!((ex.kl - 75f64.ln()).abs() < 1e-6);
        assert_eq!(ex.fidelity_mean, 1.0);
        assert!(expressibility(&idle, 999, 75, 0).is_err());
        assert!(expressibility(&idle, 1000, 9, 0).is_err());
    }

    #[test]
    fn reports_are_reproducible() {
        let c = Registry::builtin().build("C2", 1).unwrap();
        let a = MetricsReport::compute("C2", &c, 1000, 75, 9).unwrap();
        let b = MetricsReport::compute("C2", &c, 1000, 75, 9).unwrap();
        assert_eq!(a, b);
        assert!(a.expressibility_kl >= 0.0);
        assert!((0.0..=1.0).contains(&a.entangling_capability));
    }
}
