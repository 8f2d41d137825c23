//! Sector enumeration, hop signs and a small Hamiltonian.
//!
//!     cargo run --example fock_basis

use hubbard_ring::hamiltonian::build_hamiltonian_with_potential;
use hubbard_ring::prelude::*;

fn main() -> Result<()> {
    let spec = SectorSpec::standard();
    println!("{spec}: dimension {}", spec.dimension());

    let small = SectorBasis::enumerate(SectorSpec::new(4, 2, 1)?);
    println!("\nL = 4, N_up = 2, N_dn = 1 ({} states)", small.dim());
    for (k, s) in small.states().iter().enumerate().take(6) {
        println!("  {k:>2}: {s}");
    }

    // the ring-closing hop passes every fermion of the same spin in between
    let state = FockState::from_sites(&[2, 4], &[1])?;
    for (to, from) in [(1, 2), (1, 4), (3, 4), (4, 1)] {
        match small.spec().apply_hop(&state, to, from, Spin::Up)? {
            Some((target, sign)) => println!("c+_{to} c_{from} {state} = {sign:+} {target}"),
            None => println!("c+_{to} c_{from} {state} = 0"),
        }
    }

    let two = SectorBasis::enumerate(SectorSpec::new(2, 1, 1)?);
    let h = build_hamiltonian_with_potential(&two, 1.0, 10.0, &[0.0, 0.0])?.to_dense_real();
    println!("\nL = 2, one fermion per spin, J = 1, U = 10 (doubled bond):\n{h}");
    Ok(())
}
