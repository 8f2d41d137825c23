//! Ring Hubbard Hamiltonian with the two-step barrier potential.
//!
//! `H = -J Σ_b Σ_σ (c†_{i,σ} c_{i+1,σ} + h.c.) + U Σ_i n_{i↑} n_{i↓} + Σ_i h_i n_i`
//! with periodic boundary conditions. Bond `b` joins site `b` and site
//! `b + 1 (mod L)`. On a two-site ring both bonds join the same pair of
//! sites, so the hopping amplitude between them is `-2J`; this is kept
//! deliberately, it gives the analytic two-level checks their `2J` frequency.

use crate::basis::{FockState, SectorBasis, Spin};
use crate::error::{Error, Result};
use crate::operator::SparseOperator;

/// Barrier height and asymmetry.
///
/// Sites 2 and `L/2 + 2` carry `height`; sites 3 and `L/2 + 3` carry
/// `alpha * height`; everything else is zero.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BarrierSpec {
    pub height: f64,
    pub alpha: f64,
}

impl BarrierSpec {
    pub fn new(height: f64, alpha: f64) -> Result<Self> {
        if !height.is_finite() {
            return Err(Error::InvalidParams(format!("barrier height must be finite, got {height}")));
        }
        if !(alpha.is_finite() && alpha >= 0.0) {
            return Err(Error::InvalidParams(format!("alpha must be >= 0, got {alpha}")));
        }
        Ok(Self { height, alpha })
    }

    /// No barrier at all.
    pub fn flat() -> Self {
        Self { height: 0.0, alpha: 0.0 }
    }

    /// Site energies `h_1..h_L` (index 0 holds site 1).
    pub fn potential(&self, sites: usize) -> Result<Vec<f64>> {
        if sites % 2 == 1 {
            return Err(Error::OddRingLength(sites));
        }
        let mut h = vec![0.0; sites];
        if self.height == 0.0 {
            return Ok(h);
        }
        if sites < 6 {
            return Err(Error::InvalidParams(format!(
                "barrier sites 2, 3, L/2+2, L/2+3 do not fit on a ring of L = {sites}"
            )));
        }
        let half = sites / 2;
        for first in [2, half + 2] {
            h[first - 1] = self.height;
            h[first] = self.alpha * self.height;
        }
        Ok(h)
    }
}

/// Energy scales of the model, in units where `J` is the reference.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ModelParams {
    /// Tunneling amplitude `J`.
    pub hopping: f64,
    /// On-site interaction `U`.
    pub interaction: f64,
    pub barrier: BarrierSpec,
}

impl ModelParams {
    /// `J = 0` is accepted here (frozen dynamics is a useful limit); the
    /// config layer insists on `J > 0` because outputs are in units of `J`.
    pub fn new(hopping: f64, interaction: f64, barrier: BarrierSpec) -> Result<Self> {
        if !(hopping.is_finite() && hopping >= 0.0) {
            return Err(Error::InvalidParams(format!("hopping J must be >= 0, got {hopping}")));
        }
        if !interaction.is_finite() {
            return Err(Error::InvalidParams(format!("interaction U must be finite, got {interaction}")));
        }
        Ok(Self { hopping, interaction, barrier })
    }

    /// `J = 1`, `U = 10 J`, `h = 20 J`, `alpha = 0.5`.
    pub fn standard() -> Self {
        Self::with_alpha(0.5)
    }

    /// Standard energies (J = 1, U = 10, h = 20) with a chosen asymmetry.
    pub fn with_alpha(alpha: f64) -> Self {
        Self { hopping: 1.0, interaction: 10.0, barrier: BarrierSpec { height: 20.0, alpha } }
    }
}

/// Builds `H` in the given sector.
pub fn build_hamiltonian(basis: &SectorBasis, params: &ModelParams) -> Result<SparseOperator<f64>> {
    let potential = params.barrier.potential(basis.sites())?;
    build_hamiltonian_with_potential(basis, params.hopping, params.interaction, &potential)
}

/// Builds `H` for an arbitrary site potential (index 0 is site 1).
pub fn build_hamiltonian_with_potential(
    basis: &SectorBasis,
    hopping: f64,
    interaction: f64,
    potential: &[f64],
) -> Result<SparseOperator<f64>> {
    let sites = basis.sites();
    if potential.len() != sites {
        return Err(Error::DimensionMismatch { expected: sites, found: potential.len() });
    }
    let mut triplets = Vec::with_capacity(basis.dim() * (1 + 4 * sites));
    for (col, state) in basis.states().iter().enumerate() {
        triplets.push((col, col, diagonal_energy(state, interaction, potential)));
        if hopping == 0.0 {
            continue;
        }
        for (to, from) in directed_bonds(sites) {
            for spin in Spin::BOTH {
                if let Some((target, sign)) = state.hop(to, from, spin) {
                    let row = basis.index_of(&target).expect("hops conserve particle number");
                    triplets.push((row, col, -hopping * f64::from(sign)));
                }
            }
        }
    }
    SparseOperator::from_triplets(basis.dim(), triplets, true)
}

fn diagonal_energy(state: &FockState, interaction: f64, potential: &[f64]) -> f64 {
    let mut e = interaction * f64::from(state.doublons());
    for (bit, &h) in potential.iter().enumerate() {
        let n = u8::from(state.occupied(bit, Spin::Up)) + u8::from(state.occupied(bit, Spin::Down));
        if n > 0 {
            e += h * f64::from(n);
        }
    }
    e
}

/// Every `(to, from)` pair of 0-based sites along the ring bonds, both directions.
pub(crate) fn directed_bonds(sites: usize) -> impl Iterator<Item = (usize, usize)> {
    (0..sites).flat_map(move |i| {
        let j = (i + 1) % sites;
        [(i, j), (j, i)]
    })
}

/// Diagonal operator `n_{i,σ}`, or `n_i = n_{i↑} + n_{i↓}` when `spin` is `None`.
pub fn build_number_operator(basis: &SectorBasis, site: usize, spin: Option<Spin>) -> Result<SparseOperator<f64>> {
    basis.spec().check_site(site)?;
    let bit = site - 1;
    let values = basis
        .states()
        .iter()
        .map(|s| match spin {
            Some(sp) => f64::from(u8::from(s.occupied(bit, sp))),
            None => f64::from(u8::from(s.occupied(bit, Spin::Up)) + u8::from(s.occupied(bit, Spin::Down))),
        })
        .collect();
    Ok(SparseOperator::diagonal(values))
}

/// Unitary implementing the site relabelling `c_{i,σ} -> c_{perm(i),σ}`.
///
/// `perm[i - 1]` is the image of 1-based site `i`. The fermionic sign is the
/// parity of the permutation needed to restore canonical operator order.
pub fn site_permutation(basis: &SectorBasis, perm: &[usize]) -> Result<SparseOperator<f64>> {
    let sites = basis.sites();
    if perm.len() != sites {
        return Err(Error::DimensionMismatch { expected: sites, found: perm.len() });
    }
    let mut seen = vec![false; sites];
    for &p in perm {
        basis.spec().check_site(p)?;
        if std::mem::replace(&mut seen[p - 1], true) {
            return Err(Error::InvalidParams(format!("site {p} appears twice in permutation")));
        }
    }
    let mut triplets = Vec::with_capacity(basis.dim());
    for (col, state) in basis.states().iter().enumerate() {
        let mut sign = 1.0;
        let mut masks = [0u64; 2];
        for spin in Spin::BOTH {
            let images: Vec<usize> = state.sites(spin).iter().map(|&s| perm[s - 1]).collect();
            if inversions(&images) % 2 == 1 {
                sign = -sign;
            }
            masks[spin.index()] = images.iter().fold(0u64, |m, &s| m | 1 << (s - 1));
        }
        let target = FockState::new(masks[0], masks[1]);
        let row = basis.index_of(&target).expect("permutations conserve particle number");
        triplets.push((row, col, sign));
    }
    SparseOperator::from_triplets(basis.dim(), triplets, false)
}

/// Mirror `i -> L + 1 - i`.
pub fn reflection(basis: &SectorBasis) -> SparseOperator<f64> {
    let sites = basis.sites();
    let perm: Vec<usize> = (1..=sites).map(|i| sites + 1 - i).collect();
    site_permutation(basis, &perm).expect("reflection is a valid permutation")
}

fn inversions(seq: &[usize]) -> usize {
    let mut n = 0;
    for (k, a) in seq.iter().enumerate() {
        n += seq[k + 1..].iter().filter(|b| *b < a).count();
    }
    n
}
