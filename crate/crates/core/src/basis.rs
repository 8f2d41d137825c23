//! Fixed-particle-number Fock sectors of the spinful ring.
//!
//! A [`FockState`] is a pair of bit masks, one per spin species. Site `i`
//! (1-based, as everywhere on the public surface) lives in bit `i - 1`.
//! Fermionic operators are ordered by site index within a species, with all
//! spin-up operators to the left of all spin-down ones. The Hamiltonian
//! conserves each species separately, so only intra-species parity ever
//! enters a matrix element.

use std::fmt;

use crate::error::{Error, Result};

/// Largest ring supported by the `u64` occupation masks.
pub const MAX_SITES: usize = 63;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Spin {
    Up,
    Down,
}

impl Spin {
    pub const BOTH: [Spin; 2] = [Spin::Up, Spin::Down];

    pub fn label(self) -> &'static str {
        match self {
            Spin::Up => "up",
            Spin::Down => "dn",
        }
    }

    pub(crate) fn index(self) -> usize {
        match self {
            Spin::Up => 0,
            Spin::Down => 1,
        }
    }
}

/// Ring length and per-species particle numbers.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct SectorSpec {
    sites: usize,
    n_up: usize,
    n_dn: usize,
}

impl SectorSpec {
    pub fn new(sites: usize, n_up: usize, n_dn: usize) -> Result<Self> {
        if !(2..=MAX_SITES).contains(&sites) {
            return Err(Error::InvalidSector(format!("ring length L = {sites} outside 2..={MAX_SITES}")));
        }
        if n_up > sites || n_dn > sites {
            return Err(Error::InvalidSector(format!(
                "particle numbers (n_up = {n_up}, n_dn = {n_dn}) exceed L = {sites}"
            )));
        }
        Ok(Self { sites, n_up, n_dn })
    }

    /// The sector studied throughout: eight sites, two up and one down fermion.
    pub fn standard() -> Self {
        Self { sites: 8, n_up: 2, n_dn: 1 }
    }

    pub fn sites(&self) -> usize {
        self.sites
    }

    pub fn n_up(&self) -> usize {
        self.n_up
    }

    pub fn n_dn(&self) -> usize {
        self.n_dn
    }

    pub fn particles(&self, spin: Spin) -> usize {
        match spin {
            Spin::Up => self.n_up,
            Spin::Down => self.n_dn,
        }
    }

    /// `C(L, n_up) * C(L, n_dn)`.
    pub fn dimension(&self) -> usize {
        binomial(self.sites, self.n_up) * binomial(self.sites, self.n_dn)
    }

    pub fn check_site(&self, site: usize) -> Result<()> {
        if site == 0 || site > self.sites {
            return Err(Error::SiteOutOfRange { site, sites: self.sites });
        }
        Ok(())
    }

    /// Occupation `n_{i,σ}` of a 1-based site.
    pub fn occupation(&self, state: &FockState, site: usize, spin: Spin) -> Result<u8> {
        self.check_site(site)?;
        Ok(state.occupied(site - 1, spin) as u8)
    }

    /// Applies `c†_{to,σ} c_{from,σ}` to a Fock state.
    ///
    /// Returns `None` when the hop is Pauli-blocked or `from` is empty,
    /// otherwise the new state and the sign `(-1)^k`, where `k` counts
    /// σ-fermions on sites strictly between the two in the order `1..L`.
    /// The ring-closing hop between sites 1 and `L` therefore crosses sites
    /// `2..L-1`.
    pub fn apply_hop(&self, state: &FockState, to: usize, from: usize, spin: Spin) -> Result<Option<(FockState, i8)>> {
        self.check_site(to)?;
        self.check_site(from)?;
        if to == from {
            return Err(Error::SameSiteHop(to));
        }
        Ok(state.hop(to - 1, from - 1, spin))
    }
}

impl fmt::Display for SectorSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "L={}, N_up={}, N_dn={}", self.sites, self.n_up, self.n_dn)
    }
}

/// Occupation pattern of both spin species.
///
/// Derived ordering is lexicographic on `(up, dn)` as integers, which is the
/// canonical basis order.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Default)]
pub struct FockState {
    pub up: u64,
    pub dn: u64,
}

impl FockState {
    pub fn new(up: u64, dn: u64) -> Self {
        Self { up, dn }
    }

    /// Builds a state from 1-based site lists. Duplicate sites are rejected.
    pub fn from_sites(up: &[usize], dn: &[usize]) -> Result<Self> {
        fn mask(sites: &[usize]) -> Result<u64> {
            let mut m = 0u64;
            for &s in sites {
                if s == 0 || s > MAX_SITES {
                    return Err(Error::SiteOutOfRange { site: s, sites: MAX_SITES });
                }
                let bit = 1u64 << (s - 1);
                if m & bit != 0 {
                    return Err(Error::InvalidInitialState(format!("site {s} occupied twice by the same spin")));
                }
                m |= bit;
            }
            Ok(m)
        }
        Ok(Self { up: mask(up)?, dn: mask(dn)? })
    }

    pub fn mask(&self, spin: Spin) -> u64 {
        match spin {
            Spin::Up => self.up,
            Spin::Down => self.dn,
        }
    }

    fn with_mask(self, spin: Spin, mask: u64) -> Self {
        match spin {
            Spin::Up => Self { up: mask, ..self },
            Spin::Down => Self { dn: mask, ..self },
        }
    }

    /// Bit test on a 0-based site.
    #[inline]
    pub fn occupied(&self, bit: usize, spin: Spin) -> bool {
        self.mask(spin) >> bit & 1 == 1
    }

    /// Number of doubly occupied sites.
    pub fn doublons(&self) -> u32 {
        (self.up & self.dn).count_ones()
    }

    /// 1-based occupied sites of one species, ascending.
    pub fn sites(&self, spin: Spin) -> Vec<usize> {
        let m = self.mask(spin);
        (0..64).filter(|b| m >> b & 1 == 1).map(|b| b + 1).collect()
    }

    /// Unchecked hop on 0-based bits; see [`SectorSpec::apply_hop`].
    #[inline]
    pub(crate) fn hop(&self, to: usize, from: usize, spin: Spin) -> Option<(FockState, i8)> {
        let (mask, sign) = hop_mask(self.mask(spin), to, from)?;
        Some((self.with_mask(spin, mask), sign))
    }
}

impl fmt::Display for FockState {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "up{:?} dn{:?}", self.sites(Spin::Up), self.sites(Spin::Down))
    }
}

#[inline]
pub(crate) fn hop_mask(mask: u64, to: usize, from: usize) -> Option<(u64, i8)> {
    debug_assert_ne!(to, from);
    let (to_bit, from_bit) = (1u64 << to, 1u64 << from);
    if mask & from_bit == 0 || mask & to_bit != 0 {
        return None;
    }
    let (lo, hi) = if to < from { (to, from) } else { (from, to) };
    // bits strictly between lo and hi
    let between = ((1u64 << hi) - 1) & !((1u64 << (lo + 1)) - 1);
    let sign = if (mask & between).count_ones().is_multiple_of(2) { 1 } else { -1 };
    Some((mask ^ to_bit ^ from_bit, sign))
}

/// All masks of `sites` bits with `count` bits set, ascending.
fn masks_with_popcount(sites: usize, count: usize) -> Vec<u64> {
    if count == 0 {
        return vec![0];
    }
    let limit = 1u64 << sites;
    let mut out = Vec::with_capacity(binomial(sites, count));
    let mut m = (1u64 << count) - 1;
    while m < limit {
        out.push(m);
        // Gosper's hack: next integer with the same popcount
        let c = m & m.wrapping_neg();
        let r = m + c;
        m = (((r ^ m) >> 2) / c) | r;
    }
    out
}

pub fn binomial(n: usize, k: usize) -> usize {
    if k > n {
        return 0;
    }
    let k = k.min(n - k);
    (0..k).fold(1usize, |acc, i| acc * (n - i) / (i + 1))
}

/// Canonically ordered list of every Fock state in a sector.
#[derive(Debug, Clone, PartialEq)]
pub struct SectorBasis {
    spec: SectorSpec,
    states: Vec<FockState>,
}

impl SectorBasis {
    /// Enumerates the sector in ascending `(up, dn)` order.
    pub fn enumerate(spec: SectorSpec) -> Self {
        let ups = masks_with_popcount(spec.sites, spec.n_up);
        let dns = masks_with_popcount(spec.sites, spec.n_dn);
        let states = ups.iter().flat_map(|&up| dns.iter().map(move |&dn| FockState { up, dn })).collect();
        Self { spec, states }
    }

    pub fn spec(&self) -> &SectorSpec {
        &self.spec
    }

    pub fn sites(&self) -> usize {
        self.spec.sites
    }

    pub fn dim(&self) -> usize {
        self.states.len()
    }

    pub fn states(&self) -> &[FockState] {
        &self.states
    }

    pub fn state(&self, index: usize) -> FockState {
        self.states[index]
    }

    /// Ordinal of a state, or `None` if it is not in the sector.
    pub fn index_of(&self, state: &FockState) -> Option<usize> {
        self.states.binary_search(state).ok()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn fock(up: &[usize], dn: &[usize]) -> FockState {
        FockState::from_sites(up, dn).unwrap()
    }

    #[test]
    fn sector_sizes() {
        let b = SectorBasis::enumerate(SectorSpec::new(8, 2, 1).unwrap());
        assert_eq!(b.dim(), 224);
        assert_eq!(SectorBasis::enumerate(SectorSpec::new(2, 1, 1).unwrap()).dim(), 4);
        let vac = SectorBasis::enumerate(SectorSpec::new(4, 0, 0).unwrap());
        assert_eq!(vac.dim(), 1);
        assert_eq!(vac.state(0), FockState::default());
    }

    #[test]
    fn rejects_bad_sectors() {
        assert!(SectorSpec::new(8, 9, 0).is_err());
        assert!(SectorSpec::new(8, 0, 9).is_err());
        assert!(SectorSpec::new(1, 0, 0).is_err());
        assert!(SectorSpec::new(64, 1, 1).is_err());
    }

    #[test]
    fn canonical_order_is_sorted_and_indexed() {
        let b = SectorBasis::enumerate(SectorSpec::new(6, 3, 2).unwrap());
        assert!(b.states().windows(2).all(|w| w[0] < w[1]));
        for (k, s) in b.states().iter().enumerate() {
            assert_eq!(b.index_of(s), Some(k));
        }
        assert_eq!(b.index_of(&fock(&[1], &[1])), None);
    }

    #[test]
    fn hop_examples() {
        let spec = SectorSpec::new(8, 2, 1).unwrap();
        let (s, sign) = spec.apply_hop(&fock(&[3], &[]), 2, 3, Spin::Up).unwrap().unwrap();
        assert_eq!(s, fock(&[2], &[]));
        assert_eq!(sign, 1);

        // Pauli blocking on the ring-closing bond
        assert!(spec.apply_hop(&fock(&[1, 2, 8], &[]), 1, 8, Spin::Up).unwrap().is_none());

        // one fermion (site 3) between sites 1 and 8
        let (s, sign) = spec.apply_hop(&fock(&[3, 8], &[]), 1, 8, Spin::Up).unwrap().unwrap();
        assert_eq!(s, fock(&[1, 3], &[]));
        assert_eq!(sign, -1);
    }

    #[test]
    fn hop_ignores_other_species() {
        // up fermions between sites 1 and 8 do not contribute to a down hop
        let spec = SectorSpec::new(8, 2, 1).unwrap();
        let s = fock(&[2, 5], &[8]);
        let (t, sign) = spec.apply_hop(&s, 1, 8, Spin::Down).unwrap().unwrap();
        assert_eq!(t, fock(&[2, 5], &[1]));
        assert_eq!(sign, 1);
    }

    #[test]
    fn hop_errors() {
        let spec = SectorSpec::new(8, 1, 0).unwrap();
        let s = fock(&[1], &[]);
        assert!(matches!(spec.apply_hop(&s, 0, 1, Spin::Up), Err(Error::SiteOutOfRange { .. })));
        assert!(matches!(spec.apply_hop(&s, 9, 1, Spin::Up), Err(Error::SiteOutOfRange { .. })));
        assert!(matches!(spec.apply_hop(&s, 1, 1, Spin::Up), Err(Error::SameSiteHop(1))));
    }

    #[test]
    fn occupation_examples() {
        let spec = SectorSpec::new(8, 2, 1).unwrap();
        assert_eq!(spec.occupation(&fock(&[4, 5], &[]), 4, Spin::Up).unwrap(), 1);
        assert_eq!(spec.occupation(&fock(&[], &[4]), 5, Spin::Down).unwrap(), 0);
        for i in 1..=8 {
            for spin in Spin::BOTH {
                assert_eq!(spec.occupation(&FockState::default(), i, spin).unwrap(), 0);
            }
        }
        assert!(spec.occupation(&FockState::default(), 9, Spin::Up).is_err());
    }

    #[test]
    fn duplicate_sites_rejected() {
        assert!(FockState::from_sites(&[3, 3], &[]).is_err());
    }

    proptest! {
        #[test]
        fn hop_back_and_forth_is_identity(
            sites in 3usize..10,
            n in 0usize..10,
            seed in any::<u64>(),
            a in 1usize..10,
            b in 1usize..10,
        ) {
            let n = n.min(sites);
            let (a, b) = ((a - 1) % sites + 1, (b - 1) % sites + 1);
            prop_assume!(a != b);
            let spec = SectorSpec::new(sites, n, 0).unwrap();
            let basis = SectorBasis::enumerate(spec);
            let s = basis.state((seed as usize) % basis.dim());
            if let Some((t, s1)) = spec.apply_hop(&s, a, b, Spin::Up).unwrap() {
                prop_assert!(basis.index_of(&t).is_some());
                let (back, s2) = spec.apply_hop(&t, b, a, Spin::Up).unwrap().unwrap();
                prop_assert_eq!(back, s);
                prop_assert_eq!(s1 * s2, 1);
            }
        }

        #[test]
        fn enumeration_is_a_bijection(sites in 2usize..9, nu in 0usize..9, nd in 0usize..9) {
            let spec = SectorSpec::new(sites, nu.min(sites), nd.min(sites)).unwrap();
            let basis = SectorBasis::enumerate(spec);
            prop_assert_eq!(basis.dim(), spec.dimension());
            for (k, s) in basis.states().iter().enumerate() {
                prop_assert_eq!(basis.index_of(s), Some(k));
                prop_assert_eq!(s.up.count_ones() as usize, spec.n_up());
                prop_assert_eq!(s.dn.count_ones() as usize, spec.n_dn());
                prop_assert!(s.up >> sites == 0 && s.dn >> sites == 0);
            }
        }
    }
}
