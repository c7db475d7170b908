use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::gate::{GateKind, GateOp, Matrix2};
use super::{MAX_QUBITS, NORM_TOLERANCE};
use crate::{Error, Result};

/// Pure state of `n_qubits` qubits as `2^n` complex amplitudes.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Statevector {
    n_qubits: usize,
    amps: Vec<Complex64>,
}

impl Statevector {
    /// `|0…0⟩`.
    pub fn zero(n_qubits: usize) -> Self {
        Self::basis(n_qubits, 0)
    }

    /// Computational basis state `|index⟩`.
    pub fn basis(n_qubits: usize, index: usize) -> Self {
        assert!(n_qubits <= MAX_QUBITS, "at most {MAX_QUBITS} qubits are supported");
        let dim = 1usize << n_qubits;
        assert!(index < dim, "basis index {index} out of range for {n_qubits} qubits");
        let mut amps = vec![Complex64::new(0.0, 0.0); dim];
        amps[index] = Complex64::new(1.0, 0.0);
        Self { n_qubits, amps }
    }

    /// Wraps amplitudes, checking the length is a power of two and the norm is 1.
    pub fn from_amplitudes(amps: Vec<Complex64>) -> Result<Self> {
        let len = amps.len();
        if len == 0 || !len.is_power_of_two() {
            return Err(Error::InvalidState(format!("length {len} is not a power of two")));
        }
        let n_qubits = len.trailing_zeros() as usize;
        if n_qubits > MAX_QUBITS {
            return Err(Error::InvalidState(format!("{n_qubits} qubits exceeds {MAX_QUBITS}")));
        }
        let state = Self { n_qubits, amps };
        let norm = state.norm_sqr();
        if (norm - 1.0).abs() > NORM_TOLERANCE {
            return Err(Error::InvalidState(format!("squared norm is {norm}")));
        }
        Ok(state)
    }

    /// Scales arbitrary nonzero amplitudes to unit norm.
    pub fn normalized(mut amps: Vec<Complex64>) -> Result<Self> {
        let norm = amps.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt();
        if norm == 0.0 || !norm.is_finite() {
            return Err(Error::InvalidState("cannot normalise a zero vector".into()));
        }
        for a in &mut amps {
            *a /= norm;
        }
        Self::from_amplitudes(amps)
    }

    pub fn n_qubits(&self) -> usize {
        self.n_qubits
    }

    pub fn dim(&self) -> usize {
        self.amps.len()
    }

    pub fn amplitudes(&self) -> &[Complex64] {
        &self.amps
    }

    pub fn amplitude(&self, index: usize) -> Complex64 {
        self.amps[index]
    }

    pub fn norm_sqr(&self) -> f64 {
        self.amps.iter().map(|a| a.norm_sqr()).sum()
    }

    /// Born-rule probabilities of the computational basis states.
    pub fn probabilities(&self) -> Vec<f64> {
        self.amps.iter().map(|a| a.norm_sqr()).collect()
    }

    /// `⟨self|other⟩`.
    pub fn inner(&self, other: &Statevector) -> Result<Complex64> {
        self.check_same_size(other)?;
        Ok(self
            .amps
            .iter()
            .zip(&other.amps)
            .map(|(a, b)| a.conj() * b)
            .sum())
    }

    /// `self ⊗ other` with `self` on the low qubits.
    pub fn tensor(&self, other: &Statevector) -> Statevector {
        let n_qubits = self.n_qubits + other.n_qubits;
        assert!(n_qubits <= MAX_QUBITS, "at most {MAX_QUBITS} qubits are supported");
        let mut amps = Vec::with_capacity(1 << n_qubits);
        for hi in &other.amps {
            for lo in &self.amps {
                amps.push(lo * hi);
            }
        }
        Statevector { n_qubits, amps }
    }

    /// Multiplies every amplitude by `e^{iφ}`.
    pub fn with_global_phase(mut self, phi: f64) -> Self {
        let phase = Complex64::from_polar(1.0, phi);
        for a in &mut self.amps {
            *a *= phase;
        }
        self
    }

    pub(crate) fn check_same_size(&self, other: &Statevector) -> Result<()> {
        if self.n_qubits != other.n_qubits {
            return Err(Error::DimensionMismatch { left: self.n_qubits, right: other.n_qubits });
        }
        Ok(())
    }

    fn check_qubit(&self, q: usize) {
        assert!(q < self.n_qubits, "qubit {q} out of range for {} qubits", self.n_qubits);
    }

    /// Applies a 2x2 unitary to `target`.
    pub fn apply_single(&mut self, target: usize, m: &Matrix2) {
        self.check_qubit(target);
        let bit = 1usize << target;
        for i in 0..self.amps.len() {
            if i & bit == 0 {
                let j = i | bit;
                let (a0, a1) = (self.amps[i], self.amps[j]);
                self.amps[i] = m[0][0] * a0 + m[0][1] * a1;
                self.amps[j] = m[1][0] * a0 + m[1][1] * a1;
            }
        }
    }

    /// Applies a 2x2 unitary to `target` on the subspace where `control` is 1.
    pub fn apply_controlled(&mut self, control: usize, target: usize, m: &Matrix2) {
        self.check_qubit(control);
        self.check_qubit(target);
        assert_ne!(control, target, "control and target must differ");
        let cbit = 1usize << control;
        let tbit = 1usize << target;
        for i in 0..self.amps.len() {
            if i & cbit != 0 && i & tbit == 0 {
                let j = i | tbit;
                let (a0, a1) = (self.amps[i], self.amps[j]);
                self.amps[i] = m[0][0] * a0 + m[0][1] * a1;
                self.amps[j] = m[1][0] * a0 + m[1][1] * a1;
            }
        }
    }

    /// Exchanges qubits `a` and `b` on the subspace where `control` is 1.
    pub fn apply_controlled_swap(&mut self, control: usize, a: usize, b: usize) {
        self.check_qubit(control);
        self.check_qubit(a);
        self.check_qubit(b);
        assert!(control != a && control != b && a != b, "qubits must be distinct");
        let (cbit, abit, bbit) = (1usize << control, 1usize << a, 1usize << b);
        for i in 0..self.amps.len() {
            // visit each (a=1,b=0) <-> (a=0,b=1) pair once
            if i & cbit != 0 && i & abit != 0 && i & bbit == 0 {
                let j = (i & !abit) | bbit;
                self.amps.swap(i, j);
            }
        }
    }

    /// Applies one gate; `params` resolves parameter slots.
    ///
    /// Validation of targets against the register is the caller's job (see
    /// [`Circuit`](super::Circuit)); out-of-range targets panic here.
    pub fn apply_gate(&mut self, op: &GateOp, params: &[f64]) {
        let m = op.target_matrix(params);
        match op.kind {
            GateKind::RX | GateKind::RY | GateKind::RZ | GateKind::H | GateKind::X => {
                self.apply_single(op.targets[0], &m)
            }
            GateKind::CNOT | GateKind::CZ | GateKind::CRX | GateKind::CRY | GateKind::CRZ => {
                self.apply_controlled(op.targets[0], op.targets[1], &m)
            }
        }
    }

    /// Purity `tr(ρ_keep²)` of the reduced state on `keep`.
    pub fn subsystem_purity(&self, keep: &[usize]) -> Result<f64> {
        let keep = self.validate_keep(keep)?;
        let env: Vec<usize> = (0..self.n_qubits).filter(|q| !keep.contains(q)).collect();
        let dk = 1usize << keep.len();
        let de = 1usize << env.len();

        // Reshape ψ into a dk x de matrix A; ρ_keep = A A†, tr(ρ²) = ‖A A†‖_F².
        let mut a = vec![Complex64::new(0.0, 0.0); dk * de];
        for (idx, amp) in self.amps.iter().enumerate() {
            let (ik, ie) = (gather(idx, &keep), gather(idx, &env));
            a[ik * de + ie] = *amp;
        }
        let mut purity = 0.0;
        for i in 0..dk {
            for j in 0..dk {
                let rho_ij: Complex64 =
                    (0..de).map(|e| a[i * de + e] * a[j * de + e].conj()).sum();
                purity += rho_ij.norm_sqr();
            }
        }
        Ok(purity)
    }

    pub(crate) fn validate_keep(&self, keep: &[usize]) -> Result<Vec<usize>> {
        if keep.is_empty() {
            return Err(Error::InvalidSubsystem("kept subsystem is empty".into()));
        }
        let mut sorted = keep.to_vec();
        sorted.sort_unstable();
        sorted.dedup();
        if sorted.len() != keep.len() {
            return Err(Error::InvalidSubsystem(format!("repeated qubit in {keep:?}")));
        }
        if let Some(&q) = sorted.iter().find(|&&q| q >= self.n_qubits) {
            return Err(Error::InvalidSubsystem(format!(
                "qubit {q} out of range for {} qubits",
                self.n_qubits
            )));
        }
        if sorted.len() == self.n_qubits {
            return Err(Error::InvalidSubsystem("kept subsystem is the whole register".into()));
        }
        Ok(sorted)
    }
}

/// Packs the bits of `index` at positions `qubits` into a compact integer.
pub(crate) fn gather(index: usize, qubits: &[usize]) -> usize {
    qubits
        .iter()
        .enumerate()
        .fold(0, |acc, (k, &q)| acc | (((index >> q) & 1) << k))
}

/// `|⟨a|b⟩|²`.
pub fn fidelity(a: &Statevector, b: &Statevector) -> Result<f64> {
    Ok(a.inner(b)?.norm_sqr())
}

/// Purity of the reduced state of `state` on the qubits in `keep`.
pub fn subsystem_purity(state: &Statevector, keep: &[usize]) -> Result<f64> {
    state.subsystem_purity(keep)
}
