//! Spin-resolved currents, transferred charge and site densities.
//!
//! The bond current on bond `b = (i, i+1 mod L)` is
//! `j_{b,σ} = -iJ (c†_{i,σ} c_{i+1,σ} - c†_{i+1,σ} c_{i,σ})`, positive when
//! particles flow towards increasing site index. The total current
//! `J_σ = Σ_b j_{b,σ}` is integrated in time with the trapezoid rule to give
//! the transferred charge `Q_σ(t)`.
//!
//! On a two-site ring the bonds `(1,2)` and `(2,1)` are traversed in
//! opposite senses, so their currents cancel and `J_σ ≡ 0` there; the
//! individual bond currents are still meaningful.

use num_complex::Complex64;
use rayon::prelude::*;

use crate::basis::{SectorBasis, Spin};
use crate::error::{Error, Result};
use crate::evolution::{QuantumState, TimeGrid};
use crate::operator::SparseOperator;

/// Total and bond-resolved current operators for both spins.
#[derive(Debug, Clone)]
pub struct CurrentOperatorSet {
    total: [SparseOperator<Complex64>; 2],
    bonds: [Vec<SparseOperator<Complex64>>; 2],
}

impl CurrentOperatorSet {
    pub fn total(&self, spin: Spin) -> &SparseOperator<Complex64> {
        &self.total[spin.index()]
    }

    /// Bond `b` (0-based) joins site `b + 1` to site `b + 2` (mod L), 1-based.
    pub fn bond(&self, spin: Spin, bond: usize) -> &SparseOperator<Complex64> {
        &self.bonds[spin.index()][bond]
    }

    pub fn bond_count(&self) -> usize {
        self.bonds[0].len()
    }
}

fn bond_triplets(basis: &SectorBasis, hopping: f64, bond: usize, spin: Spin) -> Vec<(usize, usize, Complex64)> {
    let sites = basis.sites();
    let (i, j) = (bond, (bond + 1) % sites);
    let forward = Complex64::new(0.0, -hopping);
    let mut triplets = Vec::new();
    for (col, state) in basis.states().iter().enumerate() {
        // -iJ c†_i c_j  and  +iJ c†_j c_i
        for (to, from, prefactor) in [(i, j, forward), (j, i, -forward)] {
            if let Some((target, sign)) = state.hop(to, from, spin) {
                let row = basis.index_of(&target).expect("hops conserve particle number");
                triplets.push((row, col, prefactor * f64::from(sign)));
            }
        }
    }
    triplets
}

pub fn build_current_operators(basis: &SectorBasis, hopping: f64) -> Result<CurrentOperatorSet> {
    let dim = basis.dim();
    let mut total = Vec::with_capacity(2);
    let mut bonds = Vec::with_capacity(2);
    for spin in Spin::BOTH {
        let per_bond: Vec<Vec<_>> = (0..basis.sites()).map(|b| bond_triplets(basis, hopping, b, spin)).collect();
        let summed = per_bond.iter().flatten().copied().collect();
        total.push(SparseOperator::from_triplets(dim, summed, true)?);
        bonds.push(
            per_bond.into_iter().map(|t| SparseOperator::from_triplets(dim, t, true)).collect::<Result<Vec<_>>>()?,
        );
    }
    let [up, dn]: [SparseOperator<Complex64>; 2] = total.try_into().expect("two spins");
    let [bup, bdn]: [Vec<_>; 2] = bonds.try_into().expect("two spins");
    Ok(CurrentOperatorSet { total: [up, dn], bonds: [bup, bdn] })
}

/// `<ψ|op|ψ>` including the imaginary part, which vanishes for Hermitian `op`.
pub fn expectation(op: &SparseOperator<Complex64>, psi: &QuantumState) -> Result<Complex64> {
    op.expectation(psi.amplitudes())
}

/// Site-resolved densities, index 0 is site 1.
#[derive(Debug, Clone, PartialEq)]
pub struct SiteDensities {
    pub total: Vec<f64>,
    pub up: Vec<f64>,
    pub dn: Vec<f64>,
}

/// `<n_{i,σ}>` for all sites, read off the probabilities of the Fock components.
pub fn densities(psi: &QuantumState) -> SiteDensities {
    let sites = psi.basis().sites();
    let mut up = vec![0.0; sites];
    let mut dn = vec![0.0; sites];
    for (state, amp) in psi.basis().states().iter().zip(psi.amplitudes()) {
        let p = amp.norm_sqr();
        if p == 0.0 {
            continue;
        }
        for bit in 0..sites {
            if state.occupied(bit, Spin::Up) {
                up[bit] += p;
            }
            if state.occupied(bit, Spin::Down) {
                dn[bit] += p;
            }
        }
    }
    let total = up.iter().zip(&dn).map(|(u, d)| u + d).collect();
    SiteDensities { total, up, dn }
}

/// Cumulative trapezoid integral of a current series on `grid`; `Q(0) = 0`.
pub fn transferred_charge(currents: &[f64], grid: &TimeGrid) -> Result<Vec<f64>> {
    if currents.len() != grid.len() {
        return Err(Error::LengthMismatch { expected: grid.len(), found: currents.len() });
    }
    let half = 0.5 * grid.dt();
    let mut q = Vec::with_capacity(currents.len());
    let mut acc = 0.0;
    q.push(acc);
    for w in currents.windows(2) {
        acc += half * (w[0] + w[1]);
        q.push(acc);
    }
    Ok(q)
}

/// Mean over the final half of the window (`t >= t_max / 2`).
pub fn final_half_mean(series: &[f64]) -> f64 {
    if series.is_empty() {
        return 0.0;
    }
    let start = (series.len() - 1) / 2;
    let tail = &series[start..];
    tail.iter().sum::<f64>() / tail.len() as f64
}

/// All observables at one output time.
#[derive(Debug, Clone, PartialEq)]
pub struct TimeSeriesRecord {
    pub t: f64,
    pub current_up: f64,
    pub current_dn: f64,
    pub charge_up: f64,
    pub charge_dn: f64,
    /// Total density per site.
    pub density: Vec<f64>,
    pub density_up: Vec<f64>,
    pub density_dn: Vec<f64>,
    /// Bond currents, entry `b` on bond `(b+1, b+2 mod L)`.
    pub bond_up: Vec<f64>,
    pub bond_dn: Vec<f64>,
    pub norm: f64,
    pub energy: f64,
}

impl TimeSeriesRecord {
    pub fn current(&self, spin: Spin) -> f64 {
        match spin {
            Spin::Up => self.current_up,
            Spin::Down => self.current_dn,
        }
    }

    pub fn charge(&self, spin: Spin) -> f64 {
        match spin {
            Spin::Up => self.charge_up,
            Spin::Down => self.charge_dn,
        }
    }

    pub fn density_of(&self, spin: Spin) -> &[f64] {
        match spin {
            Spin::Up => &self.density_up,
            Spin::Down => &self.density_dn,
        }
    }

    pub fn bonds_of(&self, spin: Spin) -> &[f64] {
        match spin {
            Spin::Up => &self.bond_up,
            Spin::Down => &self.bond_dn,
        }
    }
}

/// Evaluates every observable on an evolved trajectory.
pub fn measure(
    states: &[QuantumState],
    h: &SparseOperator<f64>,
    currents: &CurrentOperatorSet,
    grid: &TimeGrid,
) -> Result<Vec<TimeSeriesRecord>> {
    if states.len() != grid.len() {
        return Err(Error::LengthMismatch { expected: grid.len(), found: states.len() });
    }
    let mut records = states
        .par_iter()
        .enumerate()
        .map(|(k, psi)| {
            let amps = psi.amplitudes();
            let re = |op: &SparseOperator<Complex64>| op.expectation(amps).map(|z| z.re);
            let bonds =
                |spin| (0..currents.bond_count()).map(|b| re(currents.bond(spin, b))).collect::<Result<Vec<f64>>>();
            let dens = densities(psi);
            Ok(TimeSeriesRecord {
                t: grid.time(k),
                current_up: re(currents.total(Spin::Up))?,
                current_dn: re(currents.total(Spin::Down))?,
                charge_up: 0.0,
                charge_dn: 0.0,
                density: dens.total,
                density_up: dens.up,
                density_dn: dens.dn,
                bond_up: bonds(Spin::Up)?,
                bond_dn: bonds(Spin::Down)?,
                norm: psi.norm(),
                energy: h.expectation(amps)?.re,
            })
        })
        .collect::<Result<Vec<_>>>()?;

    let j_up: Vec<f64> = records.iter().map(|r| r.current_up).collect();
    let j_dn: Vec<f64> = records.iter().map(|r| r.current_dn).collect();
    let q_up = transferred_charge(&j_up, grid)?;
    let q_dn = transferred_charge(&j_dn, grid)?;
    for (r, (qu, qd)) in records.iter_mut().zip(q_up.into_iter().zip(q_dn)) {
        r.charge_up = qu;
        r.charge_dn = qd;
    }
    Ok(records)
}

/// Largest violation of `d<n_{i,σ}>/dt = j_{(i-1,i),σ} - j_{(i,i+1),σ}`.
///
/// The derivative is a centered difference, so the residual is `O(dt²)`.
/// Maximum over sites, spins and interior grid times.
pub fn continuity_check(records: &[TimeSeriesRecord], grid: &TimeGrid) -> Result<f64> {
    if records.len() != grid.len() {
        return Err(Error::LengthMismatch { expected: grid.len(), found: records.len() });
    }
    if records.len() < 3 {
        return Err(Error::InvalidGrid("continuity check needs at least three samples".into()));
    }
    let sites = records[0].density.len();
    let inv = 1.0 / (2.0 * grid.dt());
    let mut worst = 0.0f64;
    for k in 1..records.len() - 1 {
        for spin in Spin::BOTH {
            let (prev, next) = (records[k - 1].density_of(spin), records[k + 1].density_of(spin));
            let bonds = records[k].bonds_of(spin);
            for i in 0..sites {
                let dndt = (next[i] - prev[i]) * inv;
                let inflow = bonds[(i + sites - 1) % sites] - bonds[i];
                worst = worst.max((dndt - inflow).abs());
            }
        }
    }
    Ok(worst)
}
