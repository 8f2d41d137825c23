//! Dense eigendecomposition and spectral synthesis.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use rayon::prelude::*;

use super::{QuantumState, TimeGrid};
use crate::error::{Error, Result};
use crate::operator::SparseOperator;

/// Eigenpairs are accepted when `‖H v - E v‖ <= RESIDUAL_TOLERANCE * ‖H‖`.
const RESIDUAL_TOLERANCE: f64 = 1e-10;

/// Full spectrum of a real symmetric Hamiltonian.
#[derive(Debug, Clone)]
pub struct ExactPropagator {
    energies: DVector<f64>,
    /// Eigenvectors as columns.
    vectors: DMatrix<f64>,
}

impl ExactPropagator {
    pub fn new(h: &SparseOperator<f64>) -> Result<Self> {
        if !h.is_hermitian() {
            return Err(Error::NotHermitian);
        }
        let dense = h.to_dense_real();
        let eig = dense
            .clone()
            .try_symmetric_eigen(f64::EPSILON, 0)
            .ok_or_else(|| Error::Eigensolver("symmetric QR iteration did not converge".into()))?;

        // sort ascending so the eigen ordering is reproducible
        let mut order: Vec<usize> = (0..h.dim()).collect();
        order.sort_by(|&a, &b| eig.eigenvalues[a].total_cmp(&eig.eigenvalues[b]));
        let energies = DVector::from_iterator(h.dim(), order.iter().map(|&k| eig.eigenvalues[k]));
        let vectors = DMatrix::from_columns(&order.iter().map(|&k| eig.eigenvectors.column(k)).collect::<Vec<_>>());

        let scale = energies.iter().fold(0.0f64, |m, e| m.max(e.abs())).max(f64::MIN_POSITIVE);
        let residual = (&dense * &vectors - &vectors * DMatrix::from_diagonal(&energies))
            .column_iter()
            .map(|c| c.norm())
            .fold(0.0, f64::max);
        if residual > RESIDUAL_TOLERANCE * scale {
            return Err(Error::Eigensolver(format!(
                "eigenpair residual {residual:.3e} exceeds {:.3e}",
                RESIDUAL_TOLERANCE * scale
            )));
        }
        Ok(Self { energies, vectors })
    }

    pub fn dim(&self) -> usize {
        self.energies.len()
    }

    /// Ascending eigenvalues.
    pub fn energies(&self) -> &[f64] {
        self.energies.as_slice()
    }

    /// The `k`-th eigenvalue and its (real) eigenvector.
    pub fn eigenpair(&self, k: usize) -> (f64, Vec<f64>) {
        (self.energies[k], self.vectors.column(k).iter().copied().collect())
    }

    /// Spectral coefficients `V^T ψ` split into real and imaginary parts.
    fn coefficients(&self, psi: &[Complex64]) -> (DVector<f64>, DVector<f64>) {
        let re = DVector::from_iterator(psi.len(), psi.iter().map(|a| a.re));
        let im = DVector::from_iterator(psi.len(), psi.iter().map(|a| a.im));
        (self.vectors.tr_mul(&re), self.vectors.tr_mul(&im))
    }

    fn synthesize(&self, coeff: &(DVector<f64>, DVector<f64>), t: f64) -> Vec<Complex64> {
        let (cr, ci) = coeff;
        let n = self.dim();
        let mut dr = DVector::zeros(n);
        let mut di = DVector::zeros(n);
        for k in 0..n {
            let phase = Complex64::from_polar(1.0, -self.energies[k] * t);
            let c = Complex64::new(cr[k], ci[k]) * phase;
            dr[k] = c.re;
            di[k] = c.im;
        }
        let re = &self.vectors * dr;
        let im = &self.vectors * di;
        re.iter().zip(im.iter()).map(|(&r, &i)| Complex64::new(r, i)).collect()
    }

    /// `exp(-iHt) ψ` for a single time.
    pub fn propagate(&self, psi: &QuantumState, t: f64) -> Result<QuantumState> {
        if psi.dim() != self.dim() {
            return Err(Error::DimensionMismatch { expected: self.dim(), found: psi.dim() });
        }
        let coeff = self.coefficients(psi.amplitudes());
        Ok(QuantumState::from_parts(psi.basis().clone(), self.synthesize(&coeff, t)))
    }

    pub(crate) fn evolve(&self, psi0: &QuantumState, grid: &TimeGrid) -> Result<Vec<QuantumState>> {
        if psi0.dim() != self.dim() {
            return Err(Error::DimensionMismatch { expected: self.dim(), found: psi0.dim() });
        }
        let coeff = self.coefficients(psi0.amplitudes());
        Ok((0..grid.len())
            .into_par_iter()
            .map(|k| {
                if k == 0 {
                    return psi0.clone();
                }
                let amps = self.synthesize(&coeff, grid.time(k));
                QuantumState::from_parts(psi0.basis().clone(), amps)
            })
            .collect())
    }
}
