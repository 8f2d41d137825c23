//! One fermion on a two-site ring: both bonds join the same pair of sites,
//! so the tunneling frequency doubles and <n_1> = cos^2(2Jt).
//!
//!     cargo run --example two_site_rabi

use std::sync::Arc;

use hubbard_ring::hamiltonian::{build_hamiltonian_with_potential, build_number_operator};
use hubbard_ring::prelude::*;

fn main() -> Result<()> {
    let j = 1.0;
    let basis = Arc::new(SectorBasis::enumerate(SectorSpec::new(2, 1, 0)?));
    let h = build_hamiltonian_with_potential(&basis, j, 0.0, &[0.0, 0.0])?;
    let n1 = build_number_operator(&basis, 1, None)?.to_complex();
    let start = basis.index_of(&FockState::from_sites(&[1], &[])?).expect("in sector");
    let psi0 = QuantumState::basis_state(basis.clone(), start)?;
    let grid = TimeGrid::new(2.0, 0.1)?;
    let states = evolve(&psi0, &h, &grid, &Propagator::exact(&h)?)?;

    println!("{:>5} {:>10} {:>12}", "t", "<n_1>", "cos^2(2Jt)");
    for (k, psi) in states.iter().enumerate() {
        let t = grid.time(k);
        println!("{t:>5.2} {:>10.6} {:>12.6}", n1.expectation(psi.amplitudes())?.re, (2.0 * j * t).cos().powi(2));
    }
    Ok(())
}
