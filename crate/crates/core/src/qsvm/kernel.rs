use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::rng::derive_seed;
use crate::sim::{fidelity, swap_test_estimate, Statevector};
use crate::{Error, Result};

/// Symmetric matrix of state overlaps `|⟨ψ_i|ψ_j⟩|²`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "Vec<Vec<f64>>", into = "Vec<Vec<f64>>")]
pub struct KernelMatrix {
    m: usize,
    data: Vec<f64>,
}

/// Overlap of two states, exact when `shots == 0`, otherwise a swap-test
/// estimate clamped into `[0, 1]`.
pub fn overlap(a: &Statevector, b: &Statevector, shots: u64, seed: u64) -> Result<f64> {
    if shots == 0 {
        fidelity(a, b)
    } else {
        Ok(swap_test_estimate(a, b, shots, seed)?.clamp(0.0, 1.0))
    }
}

impl KernelMatrix {
    /// Exact overlaps; the diagonal is exactly 1.
    pub fn exact(states: &[&Statevector]) -> Result<Self> {
        Self::build(states, 0, 0)
    }

    /// Swap-test estimates for every unordered pair, diagonal included.
    pub fn swap_test(states: &[&Statevector], shots: u64, seed: u64) -> Result<Self> {
        if shots == 0 {
            return Err(Error::ZeroShots);
        }
        Self::build(states, shots, seed)
    }

    fn build(states: &[&Statevector], shots: u64, seed: u64) -> Result<Self> {
        let m = states.len();
        for s in states {
            states[0].check_same_size(s)?;
        }
        let pairs: Vec<(usize, usize)> = (0..m).flat_map(|i| (i..m).map(move |j| (i, j))).collect();
        let values: Vec<f64> = pairs
            .par_iter()
            .map(|&(i, j)| {
                if shots == 0 && i == j {
                    Ok(1.0)
                } else {
                    overlap(states[i], states[j], shots, derive_seed(seed, (i * m + j) as u64))
                }
            })
            .collect::<Result<_>>()?;
        let mut data = vec![0.0; m * m];
        for (&(i, j), v) in pairs.iter().zip(values) {
            data[i * m + j] = v;
            data[j * m + i] = v;
        }
        Ok(Self { m, data })
    }

    pub fn from_rows(rows: Vec<Vec<f64>>) -> Result<Self> {
        let m = rows.len();
        let mut data = Vec::with_capacity(m * m);
        for row in rows {
            if row.len() != m {
                return Err(Error::DimensionMismatch { left: m, right: row.len() });
            }
            data.extend(row);
        }
        if let Some(bad) = data.iter().find(|v| !(0.0..=1.0).contains(*v)) {
            return Err(Error::InvalidState(format!("kernel entry {bad} outside [0, 1]")));
        }
        let k = Self { m, data };
        for i in 0..m {
            for j in 0..i {
                if k.get(i, j) != k.get(j, i) {
                    return Err(Error::InvalidState(format!("kernel not symmetric at ({i}, {j})")));
                }
            }
        }
        Ok(k)
    }

    pub fn m(&self) -> usize {
        self.m
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.data[i * self.m + j]
    }

    pub fn row(&self, i: usize) -> &[f64] {
        &self.data[i * self.m..(i + 1) * self.m]
    }

    pub fn rows(&self) -> Vec<Vec<f64>> {
        (0..self.m).map(|i| self.row(i).to_vec()).collect()
    }
}

impl TryFrom<Vec<Vec<f64>>> for KernelMatrix {
    type Error = Error;

    fn try_from(rows: Vec<Vec<f64>>) -> Result<Self> {
        Self::from_rows(rows)
    }
}

impl From<KernelMatrix> for Vec<Vec<f64>> {
    fn from(k: KernelMatrix) -> Self {
        k.rows()
    }
}
