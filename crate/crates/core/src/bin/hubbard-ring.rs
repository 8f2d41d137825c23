use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};

use hubbard_ring::cli::{self, Overrides};
use hubbard_ring::evolution::PropagatorMode;
use hubbard_ring::selftest::run_selftest;

#[derive(Parser)]
#[command(version, about = "Spin-resolved transport in a Fermi-Hubbard ring with asymmetric barriers")]
struct Args {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run the scenario described by a TOML config file.
    Run {
        config: PathBuf,
        /// Output directory (overrides the config and HUBBARD_RING_OUT).
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long)]
        no_plots: bool,
        #[arg(long, value_enum)]
        mode: Option<Mode>,
    },
    /// List the built-in scenarios.
    ListScenarios,
    /// Check invariants on the default configuration.
    Selftest,
}

#[derive(Clone, Copy, ValueEnum)]
enum Mode {
    Exact,
    Krylov,
}

fn main() -> ExitCode {
    match Args::parse().command {
        Command::Run { config, out, no_plots, mode } => {
            let overrides = Overrides {
                out,
                no_plots,
                mode: mode.map(|m| match m {
                    Mode::Exact => PropagatorMode::Exact,
                    Mode::Krylov => PropagatorMode::Krylov,
                }),
            };
            let result = cli::load_config(&config).and_then(|mut cfg| {
                overrides.apply(&mut cfg);
                cli::execute(&cfg)
            });
            match result {
                Ok(report) => {
                    println!("wrote {} data files to {}", report.data_files.len(), report.dir.display());
                    if let Some(err) = report.plot_error {
                        eprintln!("warning: plotting failed: {err}");
                    } else if !report.plot_files.is_empty() {
                        println!("wrote {} plots", report.plot_files.len());
                    }
                    ExitCode::SUCCESS
                }
                Err(e) => {
                    eprintln!("error: {e}");
                    ExitCode::from(e.exit_code() as u8)
                }
            }
        }
        Command::ListScenarios => {
            print!("{}", cli::list_scenarios());
            ExitCode::SUCCESS
        }
        Command::Selftest => match run_selftest() {
            Ok(checks) => {
                for c in &checks {
                    println!("[{}] {}: {}", if c.passed { "PASS" } else { "FAIL" }, c.name, c.detail);
                }
                if checks.iter().all(|c| c.passed) {
                    ExitCode::SUCCESS
                } else {
                    ExitCode::from(hubbard_ring::error::EXIT_NUMERICAL as u8)
                }
            }
            Err(e) => {
                eprintln!("error: {e}");
                ExitCode::from(e.exit_code() as u8)
            }
        },
    }
}
