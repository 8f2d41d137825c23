//! Independent fermionic operator algebra for oracle tests.
//!
//! States are sorted lists of global mode indices, `c†_{m_1} c†_{m_2} ... |0⟩`
//! with `m_1 < m_2 < ...`; operators are moved into place by counting
//! transpositions, without any knowledge of the bit-mask representation.

#![allow(dead_code)]

use hubbard_ring::basis::{FockState, Spin};

/// Global mode index: spin-up modes first, each species in site order.
pub fn mode(site: usize, spin: Spin, sites: usize) -> usize {
    match spin {
        Spin::Up => site - 1,
        Spin::Down => sites + site - 1,
    }
}

/// A product state `c†_{m_1} c†_{m_2} ... |0⟩` with `m_1 < m_2 < ...`.
pub type Word = Vec<usize>;

fn create(word: &Word, m: usize) -> Option<(Word, f64)> {
    match word.binary_search(&m) {
        Ok(_) => None,
        Err(p) => {
            let mut w = word.clone();
            w.insert(p, m);
            Some((w, if p % 2 == 0 { 1.0 } else { -1.0 }))
        }
    }
}

fn annihilate(word: &Word, m: usize) -> Option<(Word, f64)> {
    let p = word.binary_search(&m).ok()?;
    let mut w = word.clone();
    w.remove(p);
    Some((w, if p % 2 == 0 { 1.0 } else { -1.0 }))
}

/// Applies `ops` right to left; `(true, m)` is `c†_m`.
pub fn apply_string(word: &Word, ops: &[(bool, usize)]) -> Option<(Word, f64)> {
    let mut w = word.clone();
    let mut sign = 1.0;
    for &(dagger, m) in ops.iter().rev() {
        let (next, s) = if dagger { create(&w, m)? } else { annihilate(&w, m)? };
        w = next;
        sign *= s;
    }
    Some((w, sign))
}

pub fn word_of(state: &FockState, sites: usize) -> Word {
    let mut w: Word = state.sites(Spin::Up).iter().map(|&i| mode(i, Spin::Up, sites)).collect();
    w.extend(state.sites(Spin::Down).iter().map(|&i| mode(i, Spin::Down, sites)));
    w
}

pub fn state_of(word: &Word, sites: usize) -> FockState {
    let up: Vec<usize> = word.iter().filter(|&&m| m < sites).map(|&m| m + 1).collect();
    let dn: Vec<usize> = word.iter().filter(|&&m| m >= sites).map(|&m| m - sites + 1).collect();
    FockState::from_sites(&up, &dn).unwrap()
}
