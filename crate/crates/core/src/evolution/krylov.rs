//! Lanczos approximation of `exp(-iH δt) ψ`.
//!
//! The Krylov space `span{ψ, Hψ, ..., H^{m-1}ψ}` is built with full
//! reorthogonalization, the small tridiagonal projection is exponentiated
//! exactly, and the step is accepted when the a posteriori estimate
//! `‖ψ‖ β_m |[exp(-iT δt)]_{m,1}|` is below tolerance. Otherwise the step is
//! split in two and retried.

use nalgebra::DMatrix;
use num_complex::Complex64;

use super::{l2_norm, QuantumState, TimeGrid};
use crate::error::{Error, Result};
use crate::operator::SparseOperator;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct KrylovSettings {
    /// Krylov subspace dimension `m` (at least 2).
    pub subspace: usize,
    /// Largest substep taken inside one output interval.
    pub max_step: f64,
    /// Accepted error estimate per substep.
    pub tolerance: f64,
    /// How many times a substep may be halved before giving up.
    pub max_halvings: u32,
}

impl Default for KrylovSettings {
    fn default() -> Self {
        Self { subspace: 30, max_step: 0.05, tolerance: 1e-12, max_halvings: 20 }
    }
}

impl KrylovSettings {
    pub fn validate(&self) -> Result<()> {
        if self.subspace < 2 {
            return Err(Error::InvalidParams(format!("Krylov subspace dimension must be >= 2, got {}", self.subspace)));
        }
        if !(self.max_step > 0.0 && self.tolerance > 0.0) {
            return Err(Error::InvalidParams("Krylov step and tolerance must be positive".into()));
        }
        Ok(())
    }
}

struct Projection {
    /// Orthonormal Lanczos vectors.
    basis: Vec<Vec<Complex64>>,
    alpha: Vec<f64>,
    /// `beta[j]` couples vectors `j` and `j + 1`; the last entry is the
    /// residual norm used in the error estimate.
    beta: Vec<f64>,
    /// The Krylov space is invariant under H, so the projection is exact.
    invariant: bool,
}

fn lanczos(h: &SparseOperator<f64>, psi: &[Complex64], m: usize) -> (f64, Projection) {
    let norm = l2_norm(psi);
    let breakdown = 1e-12 * h.norm_bound().max(1.0);
    let mut basis: Vec<Vec<Complex64>> = vec![psi.iter().map(|a| a / norm).collect()];
    let mut alpha = Vec::with_capacity(m);
    let mut beta = Vec::with_capacity(m);
    let mut w = vec![Complex64::default(); psi.len()];
    let mut invariant = false;

    for j in 0..m {
        h.apply(&basis[j], &mut w);
        let a: f64 = basis[j].iter().zip(&w).map(|(v, x)| (v.conj() * x).re).sum();
        alpha.push(a);
        for (x, v) in w.iter_mut().zip(&basis[j]) {
            *x -= v * a;
        }
        if j > 0 {
            let b = beta[j - 1];
            for (x, v) in w.iter_mut().zip(&basis[j - 1]) {
                *x -= v * b;
            }
        }
        // full reorthogonalization, twice is enough
        for _ in 0..2 {
            for v in &basis {
                let c: Complex64 = v.iter().zip(&w).map(|(p, x)| p.conj() * x).sum();
                for (x, p) in w.iter_mut().zip(v) {
                    *x -= p * c;
                }
            }
        }
        let b = l2_norm(&w);
        beta.push(b);
        if b < breakdown {
            invariant = true;
            break;
        }
        if j + 1 < m {
            basis.push(w.iter().map(|x| x / b).collect());
        }
    }
    (norm, Projection { basis, alpha, beta, invariant })
}

/// First column of `exp(-i T dt)` for the tridiagonal `T`.
fn exp_tridiagonal_e1(alpha: &[f64], beta: &[f64], dt: f64) -> Vec<Complex64> {
    let k = alpha.len();
    let mut t = DMatrix::zeros(k, k);
    for i in 0..k {
        t[(i, i)] = alpha[i];
        if i + 1 < k {
            t[(i, i + 1)] = beta[i];
            t[(i + 1, i)] = beta[i];
        }
    }
    let eig = t.symmetric_eigen();
    (0..k)
        .map(|row| {
            (0..k)
                .map(|n| {
                    let q = eig.eigenvectors[(row, n)] * eig.eigenvectors[(0, n)];
                    Complex64::from_polar(q, -eig.eigenvalues[n] * dt)
                })
                .sum()
        })
        .collect()
}

/// One Krylov step without adaptivity: the propagated vector and the error estimate.
fn try_step(h: &SparseOperator<f64>, psi: &[Complex64], dt: f64, m: usize) -> (Vec<Complex64>, f64) {
    let (norm, proj) = lanczos(h, psi, m);
    if norm == 0.0 {
        return (psi.to_vec(), 0.0);
    }
    let k = proj.basis.len();
    let y = exp_tridiagonal_e1(&proj.alpha[..k], &proj.beta[..k.saturating_sub(1)], dt);
    let mut out = vec![Complex64::default(); psi.len()];
    for (coef, v) in y.iter().zip(&proj.basis) {
        let c = coef * norm;
        for (o, x) in out.iter_mut().zip(v) {
            *o += c * x;
        }
    }
    let estimate = if proj.invariant { 0.0 } else { norm * proj.beta[k - 1] * y[k - 1].norm() };
    (out, estimate)
}

/// Advances by `dt`, halving recursively until every piece meets tolerance.
/// On failure returns the offending estimate.
fn adaptive_step(
    h: &SparseOperator<f64>,
    psi: &[Complex64],
    dt: f64,
    settings: &KrylovSettings,
    depth: u32,
) -> std::result::Result<Vec<Complex64>, f64> {
    let (out, estimate) = try_step(h, psi, dt, settings.subspace);
    if estimate <= settings.tolerance {
        return Ok(out);
    }
    if depth >= settings.max_halvings {
        return Err(estimate);
    }
    let half = adaptive_step(h, psi, dt / 2.0, settings, depth + 1)?;
    adaptive_step(h, &half, dt / 2.0, settings, depth + 1)
}

/// Krylov approximation of `exp(-iH dt) ψ` with substep halving.
pub fn krylov_step(
    psi: &QuantumState,
    h: &SparseOperator<f64>,
    dt: f64,
    settings: &KrylovSettings,
) -> Result<QuantumState> {
    settings.validate()?;
    if h.dim() != psi.dim() {
        return Err(Error::DimensionMismatch { expected: h.dim(), found: psi.dim() });
    }
    if dt < 0.0 || !dt.is_finite() {
        return Err(Error::InvalidGrid(format!("Krylov step must be >= 0, got {dt}")));
    }
    if dt == 0.0 {
        return Ok(psi.clone());
    }
    let amps = adaptive_step(h, psi.amplitudes(), dt, settings, 0).map_err(|estimate| Error::KrylovNonConvergence {
        step: 0,
        time: dt,
        estimate,
    })?;
    Ok(QuantumState::from_parts(psi.basis().clone(), amps))
}

pub(crate) fn evolve(
    psi0: &QuantumState,
    h: &SparseOperator<f64>,
    grid: &TimeGrid,
    settings: &KrylovSettings,
) -> Result<Vec<QuantumState>> {
    settings.validate()?;
    let substeps = (grid.dt() / settings.max_step).ceil().max(1.0) as usize;
    let sub_dt = grid.dt() / substeps as f64;
    let mut out = Vec::with_capacity(grid.len());
    let mut current = psi0.amplitudes().to_vec();
    out.push(psi0.clone());
    for step in 1..grid.len() {
        for _ in 0..substeps {
            current = adaptive_step(h, &current, sub_dt, settings, 0)
                .map_err(|estimate| Error::KrylovNonConvergence { step, time: grid.time(step), estimate })?;
        }
        out.push(QuantumState::from_parts(psi0.basis().clone(), current.clone()));
    }
    Ok(out)
}
