//! Symmetric initial superposition under an asymmetric (alpha = 0.5) and a
//! symmetric (alpha = 1) barrier.
//!
//!     cargo run --example barrier_comparison

use hubbard_ring::prelude::*;

fn main() -> Result<()> {
    let cmp =
        run_barrier_comparison(SectorSpec::standard(), &ModelParams::standard(), &RunSettings::default())?;

    println!("{:>6} {:>12} {:>12} {:>12} {:>12}", "t", "Q_up(0.5)", "Q_dn(0.5)", "Q_up(1)", "Q_dn(1)");
    for (a, s) in cmp.asymmetric.records.iter().zip(&cmp.symmetric.records).step_by(80) {
        println!(
            "{:>6.1} {:>12.6} {:>12.6} {:>12.3e} {:>12.3e}",
            a.t, a.charge_up, a.charge_dn, s.charge_up, s.charge_dn
        );
    }
    for run in [&cmp.asymmetric, &cmp.symmetric] {
        println!(
            "alpha = {}: max|Q_up| = {:.3e}, max|Q_dn| = {:.3e}",
            run.alpha,
            run.max_abs_charge(Spin::Up),
            run.max_abs_charge(Spin::Down)
        );
    }
    Ok(())
}
