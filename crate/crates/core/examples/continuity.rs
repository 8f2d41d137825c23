//! The lattice continuity equation dn_i/dt = j_{i-1} - j_i, checked by
//! centered differences; the residual shrinks as dt^2.
//!
//!     cargo run --example continuity

use hubbard_ring::prelude::*;

fn main() -> Result<()> {
    let basis = std::sync::Arc::new(SectorBasis::enumerate(SectorSpec::standard()));
    let params = ModelParams::standard();
    let h = build_hamiltonian(&basis, &params)?;
    let currents = build_current_operators(&basis, params.hopping)?;
    let psi0 = build_initial_state(&InitialStateSpec::SymmetricSuperposition, basis.clone())?;
    let exact = Propagator::exact(&h)?;

    let mut previous: Option<f64> = None;
    for dt in [0.1, 0.05, 0.025, 0.0125] {
        let grid = TimeGrid::new(40.0, dt)?;
        let records = measure(&evolve(&psi0, &h, &grid, &exact)?, &h, &currents, &grid)?;
        let residual = continuity_check(&records, &grid)?;
        match previous {
            Some(p) => println!("dt = {dt:<7} residual {residual:.3e}  ratio {:.3}", p / residual),
            None => println!("dt = {dt:<7} residual {residual:.3e}"),
        }
        previous = Some(residual);
    }
    Ok(())
}
