//! A doublon beside the alpha*h step (A) or the h step (B) sends both spin
//! species the opposite way.
//!
//!     cargo run --example direction_flip [alpha]

use hubbard_ring::prelude::*;

fn main() -> Result<()> {
    let alpha: f64 = std::env::args().nth(1).map_or(Ok(0.5), |a| a.parse()).expect("alpha must be a number");
    let params = ModelParams::with_alpha(alpha);
    for config in BiasedConfig::BOTH {
        let (doublon, up) = config.sites(8);
        let run = run_direction_flip(config, SectorSpec::standard(), &params, &RunSettings::default())?;
        println!(
            "{config}: doublon on {doublon}, up on {up}: Qbar_up = {:+.4}, Qbar_dn = {:+.4}, counter-propagating: {}",
            run.qbar(Spin::Up),
            run.qbar(Spin::Down),
            run.counter_propagating()
        );
    }
    Ok(())
}
