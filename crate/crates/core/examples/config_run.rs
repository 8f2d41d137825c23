//! Runs a TOML config the way the `hubbard-ring run` command does.
//!
//!     cargo run --example config_run -- crates/core/configs/direction-flip.toml [out-dir]

use std::path::PathBuf;

use hubbard_ring::cli::{execute, load_config, RunConfig};
use hubbard_ring::Result;

const FALLBACK: &str = r#"
scenario = "direction-flip"

[time]
t_max = 10.0

[output]
plots = false
"#;

fn main() -> Result<()> {
    let mut args = std::env::args().skip(1);
    let mut config = match args.next() {
        Some(path) => load_config(&PathBuf::from(path))?,
        None => RunConfig::parse(FALLBACK)?,
    };
    config.output.dir =
        Some(args.next().map_or_else(|| std::env::temp_dir().join("hubbard-ring-example"), PathBuf::from));

    print!("{}", config.to_toml());
    let report = execute(&config)?;
    println!("\n{} data files, {} plots in {}", report.data_files.len(), report.plot_files.len(), report.dir.display());
    if let Some(err) = report.plot_error {
        println!("plotting failed: {err}");
    }
    Ok(())
}
