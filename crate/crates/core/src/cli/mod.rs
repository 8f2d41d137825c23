//! Config-driven runs: load a TOML file, run the scenario, write data, then plots.

pub mod config;
pub mod output;
pub mod plot;

use std::fs;
use std::path::{Path, PathBuf};

pub use config::{OutputFormat, OutputSettings, RunConfig};

use crate::error::{Error, Result};
use crate::evolution::PropagatorMode;
use crate::scenarios::{run_scenario, ScenarioKind, ScenarioOutput};

/// Output directory used when neither `--out` nor `[output] dir` is given.
pub const OUT_DIR_ENV: &str = "HUBBARD_RING_OUT";
pub const DEFAULT_OUT_DIR: &str = "out";

/// Command-line overrides of a config file.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct Overrides {
    pub out: Option<PathBuf>,
    pub no_plots: bool,
    pub mode: Option<PropagatorMode>,
}

impl Overrides {
    pub fn apply(&self, config: &mut RunConfig) {
        if let Some(out) = &self.out {
            config.output.dir = Some(out.clone());
        }
        if self.no_plots {
            config.output.plots = false;
        }
        if let Some(mode) = self.mode {
            config.spec.settings.mode = mode;
        }
    }
}

pub fn load_config(path: &Path) -> Result<RunConfig> {
    let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    RunConfig::parse(&text).map_err(|e| match e {
        Error::Config(msg) => Error::Config(format!("{}: {msg}", path.display())),
        other => other,
    })
}

/// `[output] dir` (after overrides), else `$HUBBARD_RING_OUT`, else `out`.
pub fn output_dir(config: &RunConfig) -> PathBuf {
    config
        .output
        .dir
        .clone()
        .or_else(|| std::env::var_os(OUT_DIR_ENV).map(PathBuf::from))
        .unwrap_or_else(|| PathBuf::from(DEFAULT_OUT_DIR))
}

#[derive(Debug)]
pub struct RunReport {
    pub dir: PathBuf,
    pub data_files: Vec<PathBuf>,
    pub plot_files: Vec<PathBuf>,
    /// Plot failures are reported but do not fail the run.
    pub plot_error: Option<String>,
    pub output: ScenarioOutput,
}

/// Runs the scenario and writes all data files before any plot is drawn.
pub fn execute(config: &RunConfig) -> Result<RunReport> {
    let output = run_scenario(&config.spec)?;
    let dir = output_dir(config);
    let data_files = output::write_outputs(&dir, config, &output)?;
    let (plot_files, plot_error) = if config.output.plots {
        match plot::emit_plots(&dir, config.spec.kind, &output) {
            Ok(files) => (files, None),
            Err(e) => (Vec::new(), Some(e.to_string())),
        }
    } else {
        (Vec::new(), None)
    };
    Ok(RunReport { dir, data_files, plot_files, plot_error, output })
}

/// One line per built-in scenario: name and description.
pub fn list_scenarios() -> String {
    ScenarioKind::ALL.iter().map(|k| format!("{:<20} {}\n", k.name(), k.description())).collect()
}
