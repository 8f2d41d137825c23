//! Lanczos propagation against full diagonalization on the default ring.
//!
//!     cargo run --example krylov_vs_exact [krylov_dim]

use std::time::Instant;

use hubbard_ring::prelude::*;

fn main() -> Result<()> {
    let subspace = std::env::args().nth(1).map_or(30, |a| a.parse().expect("integer subspace size"));
    let basis = std::sync::Arc::new(SectorBasis::enumerate(SectorSpec::standard()));
    let h = build_hamiltonian(&basis, &ModelParams::standard())?;
    let psi0 = build_initial_state(&BiasedConfig::A.initial_state(8), basis.clone())?;
    let grid = TimeGrid::standard();
    let currents = build_current_operators(&basis, 1.0)?;

    let mut results = Vec::new();
    for propagator in [Propagator::exact(&h)?, Propagator::krylov(KrylovSettings { subspace, ..Default::default() })] {
        let start = Instant::now();
        let states = evolve(&psi0, &h, &grid, &propagator)?;
        let records = measure(&states, &h, &currents, &grid)?;
        println!("{:?}: {} steps in {:.2?}", propagator.mode(), grid.steps(), start.elapsed());
        results.push((states, records));
    }
    let (exact, krylov) = (&results[0], &results[1]);
    let amp = exact.0.iter().zip(&krylov.0).map(|(a, b)| a.max_abs_diff(b)).fold(0.0, f64::max);
    let q = exact
        .1
        .iter()
        .zip(&krylov.1)
        .map(|(a, b)| (a.charge_up - b.charge_up).abs().max((a.charge_dn - b.charge_dn).abs()))
        .fold(0.0, f64::max);
    println!("max amplitude difference {amp:.2e}, max charge difference {q:.2e}");
    Ok(())
}
