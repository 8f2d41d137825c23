//! Time-averaged transferred charge of both biased configurations over a
//! range of barrier asymmetries.
//!
//!     cargo run --release --example alpha_scan [min max step]

use hubbard_ring::prelude::*;

fn main() -> Result<()> {
    let args: Vec<f64> = std::env::args().skip(1).map(|a| a.parse().expect("numeric argument")).collect();
    let grid = match args[..] {
        [min, max, step] => AlphaGrid::range(min, max, step)?,
        _ => AlphaGrid::standard(),
    };
    for config in BiasedConfig::BOTH {
        let scan = run_alpha_scan(
            &grid,
            config,
            SectorSpec::standard(),
            &ModelParams::standard(),
            &RunSettings::default(),
        )?;
        println!("configuration {config}");
        println!("{:>6} {:>10} {:>10}  counter", "alpha", "Qbar_up", "Qbar_dn");
        for p in &scan.points {
            println!(
                "{:>6.2} {:>+10.4} {:>+10.4}  {}",
                p.alpha,
                p.qbar_up,
                p.qbar_dn,
                if p.counter_propagating() { "*" } else { "" }
            );
        }
        let window = scan.counter_window();
        match (window.first(), window.last()) {
            (Some(lo), Some(hi)) => println!("counter-propagation for alpha in [{lo:.2}, {hi:.2}]\n"),
            _ => println!("no counter-propagation\n"),
        }
    }
    Ok(())
}
