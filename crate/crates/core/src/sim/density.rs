//! Density matrices, used for mixed separable states and as an independent
//! route to reduced-state quantities.

use nalgebra::DMatrix;
use num_complex::Complex64;

use super::state::{gather, Statevector};
use crate::{Error, Result};

#[derive(Debug, Clone, PartialEq)]
pub struct DensityMatrix {
    n_qubits: usize,
    data: DMatrix<Complex64>,
}

impl DensityMatrix {
    /// `|ψ⟩⟨ψ|`.
    pub fn from_pure(state: &Statevector) -> Self {
        let dim = state.dim();
        let a = state.amplitudes();
        let data = DMatrix::from_fn(dim, dim, |i, j| a[i] * a[j].conj());
        Self { n_qubits: state.n_qubits(), data }
    }

    /// `Σ p_k |ψ_k⟩⟨ψ_k|` for nonnegative weights summing to 1.
    pub fn mixture(weights: &[f64], states: &[Statevector]) -> Result<Self> {
        if weights.len() != states.len() || states.is_empty() {
            return Err(Error::InvalidState("need one weight per state".into()));
        }
        if weights.iter().any(|&p| p < 0.0 || !p.is_finite()) {
            return Err(Error::InvalidState("mixture weights must be nonnegative".into()));
        }
        let total: f64 = weights.iter().sum();
        if (total - 1.0).abs() > 1e-10 {
            return Err(Error::InvalidState(format!("mixture weights sum to {total}")));
        }
        let n_qubits = states[0].n_qubits();
        let dim = states[0].dim();
        let mut data = DMatrix::zeros(dim, dim);
        for (p, s) in weights.iter().zip(states) {
            if s.n_qubits() != n_qubits {
                return Err(Error::DimensionMismatch { left: n_qubits, right: s.n_qubits() });
            }
            data += Self::from_pure(s).data * Complex64::new(*p, 0.0);
        }
        Ok(Self { n_qubits, data })
    }

    pub fn n_qubits(&self) -> usize {
        self.n_qubits
    }

    pub fn matrix(&self) -> &DMatrix<Complex64> {
        &self.data
    }

    pub fn trace(&self) -> Complex64 {
        self.data.trace()
    }

    /// `tr(ρ²)`.
    pub fn purity(&self) -> f64 {
        (&self.data * &self.data).trace().re
    }

    /// Reduced state on `keep` (trace over the complement).
    pub fn partial_trace(&self, keep: &[usize]) -> Result<DensityMatrix> {
        let mut keep = keep.to_vec();
        keep.sort_unstable();
        keep.dedup();
        if keep.is_empty() || keep.iter().any(|&q| q >= self.n_qubits) {
            return Err(Error::InvalidSubsystem(format!("{keep:?} for {} qubits", self.n_qubits)));
        }
        let env: Vec<usize> = (0..self.n_qubits).filter(|q| !keep.contains(q)).collect();
        let dim = self.data.nrows();
        let dk = 1usize << keep.len();
        let mut out = DMatrix::zeros(dk, dk);
        for i in 0..dim {
            for j in 0..dim {
                if gather(i, &env) == gather(j, &env) {
                    out[(gather(i, &keep), gather(j, &keep))] += self.data[(i, j)];
                }
            }
        }
        Ok(DensityMatrix { n_qubits: keep.len(), data: out })
    }

    /// Eigenvalues of the Hermitian part, ascending.
    pub fn eigenvalues(&self) -> Vec<f64> {
        let herm = (&self.data + self.data.adjoint()) * Complex64::new(0.5, 0.0);
        let mut ev: Vec<f64> = herm.symmetric_eigenvalues().iter().copied().collect();
        ev.sort_by(f64::total_cmp);
        ev
    }

    /// Checks Hermiticity, unit trace and positivity within `tol`.
    pub fn validate(&self, tol: f64) -> Result<()> {
        let herm_err = (&self.data - self.data.adjoint()).iter().map(|z| z.norm()).fold(0.0, f64::max);
        if herm_err > tol {
            return Err(Error::InvalidState(format!("not Hermitian (max deviation {herm_err})")));
        }
        let tr = self.trace();
        if (tr.re - 1.0).abs() > tol || tr.im.abs() > tol {
            return Err(Error::InvalidState(format!("trace is {tr}")));
        }
        if let Some(&min) = self.eigenvalues().first() {
            if min < -tol {
                return Err(Error::InvalidState(format!("negative eigenvalue {min}")));
            }
        }
        Ok(())
    }

    /// Eigenvalues this close to zero are rounding noise; their square roots
    /// would otherwise leak ~1e-8 into the concurrence.
    fn rank_floor(v: f64) -> f64 {
        if v < 1e-13 {
            0.0
        } else {
            v
        }
    }

    /// Wootters concurrence of a two-qubit state from the spectrum of
    /// `√ρ (σy⊗σy) ρ* (σy⊗σy) √ρ`.
    pub fn wootters_concurrence(&self) -> Result<f64> {
        if self.n_qubits != 2 {
            return Err(Error::InvalidState("concurrence needs exactly two qubits".into()));
        }
        let c = |re: f64| Complex64::new(re, 0.0);
        let mut yy = DMatrix::zeros(4, 4);
        yy[(0, 3)] = c(-1.0);
        yy[(1, 2)] = c(1.0);
        yy[(2, 1)] = c(1.0);
        yy[(3, 0)] = c(-1.0);
        let rho_tilde = &yy * self.data.map(|z| z.conj()) * &yy;

        let herm = (&self.data + self.data.adjoint()) * c(0.5);
        let eig = herm.symmetric_eigen();
        let sqrt_vals = eig.eigenvalues.map(|v| c(Self::rank_floor(v).sqrt()));
        let sqrt_rho = &eig.eigenvectors * DMatrix::from_diagonal(&sqrt_vals) * eig.eigenvectors.adjoint();

        let r = &sqrt_rho * rho_tilde * &sqrt_rho;
        let r = (&r + r.adjoint()) * c(0.5);
        let mut lambdas: Vec<f64> = r.symmetric_eigenvalues().iter().map(|&v| Self::rank_floor(v).sqrt()).collect();
        lambdas.sort_by(|a, b| b.total_cmp(a));
        Ok((lambdas[0] - lambdas[1] - lambdas[2] - lambdas[3]).max(0.0))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::FRAC_1_SQRT_2;

    fn bell() -> Statevector {
        let h = Complex64::new(FRAC_1_SQRT_2, 0.0);
        let z = Complex64::new(0.0, 0.0);
        Statevector::from_amplitudes(vec![h, z, z, h]).unwrap()
    }

    #[test]
    fn pure_state_is_valid() {
        let rho = DensityMatrix::from_pure(&bell());
        rho.validate(1e-10).unwrap();
        assert!((rho.purity() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn partial_trace_of_bell_is_maximally_mixed() {
        let rho = DensityMatrix::from_pure(&bell()).partial_trace(&[1]).unwrap();
        assert!((rho.purity() - 0.5).abs() < 1e-12);
        rho.validate(1e-10).unwrap();
    }

    #[test]
    fn partial_trace_agrees_with_statevector_route() {
        let s = Statevector::normalized(
            (0..8).map(|k| Complex64::new((k as f64 * 0.37).sin(), (k as f64 * 1.3).cos())).collect(),
        )
        .unwrap();
        let rho = DensityMatrix::from_pure(&s);
        for keep in [vec![0], vec![1], vec![2], vec![0, 2], vec![1, 2]] {
            let direct = s.subsystem_purity(&keep).unwrap();
            let via_rho = rho.partial_trace(&keep).unwrap().purity();
            assert!((direct - via_rho).abs() < 1e-12, "{keep:?}");
        }
    }

    #[test]
    fn concurrence_of_bell_and_product() {
        assert!((DensityMatrix::from_pure(&bell()).wootters_concurrence().unwrap() - 1.0).abs() < 1e-9);
        let product = DensityMatrix::from_pure(&Statevector::basis(2, 1));
        assert!(product.wootters_concurrence().unwrap().abs() < 1e-9);
        assert!(DensityMatrix::from_pure(&Statevector::zero(3)).wootters_concurrence().is_err());
    }

    #[test]
    fn mixture_validation() {
        let a = Statevector::zero(1);
        let b = Statevector::basis(1, 1);
        let rho = DensityMatrix::mixture(&[0.25, 0.75], &[a.clone(), b.clone()]).unwrap();
        rho.validate(1e-10).unwrap();
        assert!((rho.purity() - (0.0625 + 0.5625)).abs() < 1e-12);
        assert!(DensityMatrix::mixture(&[0.5, 0.6], &[a.clone(), b.clone()]).is_err());
        assert!(DensityMatrix::mixture(&[-0.5, 1.5], &[a, b]).is_err());
    }
}
