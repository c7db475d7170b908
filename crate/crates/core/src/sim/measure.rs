use rand::Rng;

use super::gate::GateKind;
use super::state::Statevector;
use crate::rng;
use crate::{Error, Result};

/// Samples `shots` computational-basis measurements of every qubit.
///
/// Returns one count per basis index; counts sum to `shots`.
pub fn sample_measurement(state: &Statevector, shots: u64, seed: u64) -> Result<Vec<u64>> {
    if shots == 0 {
        return Err(Error::ZeroShots);
    }
    let probs = state.probabilities();
    let total: f64 = probs.iter().sum();
    let mut cumulative = Vec::with_capacity(probs.len());
    let mut acc = 0.0;
    for p in &probs {
        acc += p / total;
        cumulative.push(acc);
    }
    let last_nonzero = probs.iter().rposition(|&p| p > 0.0).unwrap_or(0);

    let mut rng = rng::rng(seed);
    let mut counts = vec![0u64; probs.len()];
    for _ in 0..shots {
        let u: f64 = rng.random();
        // first index whose cumulative mass exceeds u; skips zero-probability outcomes
        let idx = cumulative.partition_point(|&c| c <= u).min(last_nonzero);
        counts[idx] += 1;
    }
    Ok(counts)
}

/// State of the `(2n+1)`-qubit swap-test register just before measurement.
///
/// Qubit 0 is the ancilla, qubits `1..=n` hold `a`, qubits `n+1..=2n` hold `b`.
pub fn swap_test_circuit_state(a: &Statevector, b: &Statevector) -> Result<Statevector> {
    a.check_same_size(b)?;
    let n = a.n_qubits();
    let mut state = Statevector::zero(1).tensor(a).tensor(b);
    let h = GateKind::H.target_matrix(0.0);
    state.apply_single(0, &h);
    for k in 0..n {
        state.apply_controlled_swap(0, 1 + k, 1 + n + k);
    }
    state.apply_single(0, &h);
    Ok(state)
}

/// Exact probability that the swap-test ancilla reads 1, `(1 - |⟨a|b⟩|²)/2`.
pub fn swap_test_p1(a: &Statevector, b: &Statevector) -> Result<f64> {
    let state = swap_test_circuit_state(a, b)?;
    Ok(state
        .probabilities()
        .iter()
        .enumerate()
        .filter(|(i, _)| i & 1 == 1)
        .map(|(_, p)| p)
        .sum())
}

/// Shot-based swap-test estimate `R = 1 - 2M/S` of `|⟨a|b⟩|²`, where `M` is
/// the number of shots with the ancilla in `|1⟩`.
///
/// Unbiased; may fall slightly outside `[0, 1]`.
pub fn swap_test_estimate(a: &Statevector, b: &Statevector, shots: u64, seed: u64) -> Result<f64> {
    if shots == 0 {
        return Err(Error::ZeroShots);
    }
    let state = swap_test_circuit_state(a, b)?;
    let counts = sample_measurement(&state, shots, seed)?;
    let ones: u64 = counts.iter().enumerate().filter(|(i, _)| i & 1 == 1).map(|(_, c)| c).sum();
    Ok(1.0 - 2.0 * ones as f64 / shots as f64)
}
