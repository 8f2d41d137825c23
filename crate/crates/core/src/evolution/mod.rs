//! Unitary time evolution `|ψ(t)> = exp(-iHt)|ψ(0)>` (ħ = 1, time in 1/J).
//!
//! Two propagators are provided: spectral synthesis from a dense
//! eigendecomposition ([`ExactPropagator`]), which is the reference path,
//! and a Lanczos propagator ([`KrylovSettings`]) for sectors too large to
//! diagonalize. They are cross-validated in the test suite.

mod exact;
mod krylov;

use std::sync::Arc;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::basis::SectorBasis;
use crate::error::{Error, Result};
use crate::operator::SparseOperator;

pub use exact::ExactPropagator;
pub use krylov::{krylov_step, KrylovSettings};

/// Norm tolerance for a state to count as normalized.
pub const NORM_TOLERANCE: f64 = 1e-10;

/// Largest sector handled by dense diagonalization in [`PropagatorMode::Auto`].
pub const EXACT_DIM_LIMIT: usize = 5000;

/// Normalized amplitude vector over a sector basis.
#[derive(Debug, Clone, PartialEq)]
pub struct QuantumState {
    basis: Arc<SectorBasis>,
    amplitudes: Vec<Complex64>,
}

impl QuantumState {
    /// Wraps amplitudes that are already normalized to within [`NORM_TOLERANCE`].
    pub fn new(basis: Arc<SectorBasis>, amplitudes: Vec<Complex64>) -> Result<Self> {
        if amplitudes.len() != basis.dim() {
            return Err(Error::DimensionMismatch { expected: basis.dim(), found: amplitudes.len() });
        }
        let norm = l2_norm(&amplitudes);
        if (norm - 1.0).abs() > NORM_TOLERANCE {
            return Err(Error::NotNormalized(norm));
        }
        Ok(Self { basis, amplitudes })
    }

    /// Rescales arbitrary nonzero amplitudes to unit norm.
    pub fn normalized(basis: Arc<SectorBasis>, mut amplitudes: Vec<Complex64>) -> Result<Self> {
        if amplitudes.len() != basis.dim() {
            return Err(Error::DimensionMismatch { expected: basis.dim(), found: amplitudes.len() });
        }
        let norm = l2_norm(&amplitudes);
        if !(norm.is_finite() && norm > 0.0) {
            return Err(Error::InvalidInitialState(format!("cannot normalize a vector of norm {norm}")));
        }
        amplitudes.iter_mut().for_each(|a| *a /= norm);
        Ok(Self { basis, amplitudes })
    }

    /// The Fock state with ordinal `index`.
    pub fn basis_state(basis: Arc<SectorBasis>, index: usize) -> Result<Self> {
        if index >= basis.dim() {
            return Err(Error::DimensionMismatch { expected: basis.dim(), found: index + 1 });
        }
        let mut amplitudes = vec![Complex64::new(0.0, 0.0); basis.dim()];
        amplitudes[index] = Complex64::new(1.0, 0.0);
        Ok(Self { basis, amplitudes })
    }

    /// Skips the normalization check; used for propagated states whose norm
    /// is monitored separately.
    pub(crate) fn from_parts(basis: Arc<SectorBasis>, amplitudes: Vec<Complex64>) -> Self {
        Self { basis, amplitudes }
    }

    pub fn basis(&self) -> &Arc<SectorBasis> {
        &self.basis
    }

    pub fn amplitudes(&self) -> &[Complex64] {
        &self.amplitudes
    }

    pub fn dim(&self) -> usize {
        self.amplitudes.len()
    }

    pub fn norm(&self) -> f64 {
        l2_norm(&self.amplitudes)
    }

    /// `<self|other>`.
    pub fn overlap(&self, other: &QuantumState) -> Complex64 {
        self.amplitudes.iter().zip(&other.amplitudes).map(|(a, b)| a.conj() * b).sum()
    }

    /// Largest amplitude-wise distance to another state.
    pub fn max_abs_diff(&self, other: &QuantumState) -> f64 {
        self.amplitudes.iter().zip(&other.amplitudes).map(|(a, b)| (a - b).norm()).fold(0.0, f64::max)
    }
}

pub(crate) fn l2_norm(v: &[Complex64]) -> f64 {
    v.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt()
}

/// Uniform output grid `0, dt, 2dt, ..., t_max`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TimeGrid {
    dt: f64,
    steps: usize,
}

impl TimeGrid {
    /// `t_max` must be a whole number of steps (to 1e-9 relative).
    pub fn new(t_max: f64, dt: f64) -> Result<Self> {
        if !(dt.is_finite() && dt > 0.0) {
            return Err(Error::InvalidGrid(format!("dt must be > 0, got {dt}")));
        }
        if !(t_max.is_finite() && t_max >= 0.0) {
            return Err(Error::InvalidGrid(format!("t_max must be >= 0, got {t_max}")));
        }
        let steps = (t_max / dt).round();
        if (steps * dt - t_max).abs() > 1e-9 * t_max.max(dt) {
            return Err(Error::InvalidGrid(format!("t_max = {t_max} is not a whole number of steps dt = {dt}")));
        }
        Ok(Self { dt, steps: steps as usize })
    }

    /// `t_max = 40/J`, `dt = 0.05/J`.
    pub fn standard() -> Self {
        Self { dt: 0.05, steps: 800 }
    }

    pub fn dt(&self) -> f64 {
        self.dt
    }

    pub fn steps(&self) -> usize {
        self.steps
    }

    /// Number of grid points, `steps + 1`.
    pub fn len(&self) -> usize {
        self.steps + 1
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn t_max(&self) -> f64 {
        self.time(self.steps)
    }

    pub fn time(&self, k: usize) -> f64 {
        k as f64 * self.dt
    }

    pub fn times(&self) -> Vec<f64> {
        (0..self.len()).map(|k| self.time(k)).collect()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum PropagatorMode {
    /// Exact below [`EXACT_DIM_LIMIT`], Krylov above.
    #[default]
    Auto,
    Exact,
    Krylov,
}

impl PropagatorMode {
    pub fn resolve(self, dim: usize) -> PropagatorMode {
        match self {
            PropagatorMode::Auto if dim <= EXACT_DIM_LIMIT => PropagatorMode::Exact,
            PropagatorMode::Auto => PropagatorMode::Krylov,
            other => other,
        }
    }
}

#[derive(Debug, Clone)]
pub enum Propagator {
    Exact(ExactPropagator),
    Krylov(KrylovSettings),
}

impl Propagator {
    pub fn exact(h: &SparseOperator<f64>) -> Result<Self> {
        Ok(Propagator::Exact(ExactPropagator::new(h)?))
    }

    pub fn krylov(settings: KrylovSettings) -> Self {
        Propagator::Krylov(settings)
    }

    pub fn for_mode(mode: PropagatorMode, h: &SparseOperator<f64>, settings: KrylovSettings) -> Result<Self> {
        match mode.resolve(h.dim()) {
            PropagatorMode::Krylov => Ok(Self::krylov(settings)),
            _ => Self::exact(h),
        }
    }

    pub fn mode(&self) -> PropagatorMode {
        match self {
            Propagator::Exact(_) => PropagatorMode::Exact,
            Propagator::Krylov(_) => PropagatorMode::Krylov,
        }
    }
}

/// Propagates `psi0` to every point of `grid`.
///
/// In exact mode every time is synthesized independently from the spectrum
/// (in parallel); in Krylov mode the state is stepped sequentially.
pub fn evolve(
    psi0: &QuantumState,
    h: &SparseOperator<f64>,
    grid: &TimeGrid,
    propagator: &Propagator,
) -> Result<Vec<QuantumState>> {
    if h.dim() != psi0.dim() {
        return Err(Error::DimensionMismatch { expected: h.dim(), found: psi0.dim() });
    }
    if !h.is_hermitian() {
        return Err(Error::NotHermitian);
    }
    let norm = psi0.norm();
    if (norm - 1.0).abs() > NORM_TOLERANCE {
        return Err(Error::NotNormalized(norm));
    }
    match propagator {
        Propagator::Exact(exact) => exact.evolve(psi0, grid),
        Propagator::Krylov(settings) => krylov::evolve(psi0, h, grid, settings),
    }
}
