//! TOML run configuration.
//!
//! Every key is optional; omitted keys take the defaults of the built-in
//! scenario. Unknown keys are rejected. Example:
//!
//! ```toml
//! scenario = "alpha-scan"        # barrier-comparison | direction-flip | alpha-scan | custom
//! configs = ["A", "B"]           # direction-flip and alpha-scan only
//!
//! [model]
//! sites = 8
//! n_up = 2
//! n_dn = 1
//! J = 1.0
//! U = 10.0
//! h = 20.0
//! alpha = 0.5
//!
//! [time]
//! t_max = 40.0
//! dt = 0.05
//!
//! [scan]                         # alpha-scan only
//! alpha_min = 0.1
//! alpha_max = 1.2
//! alpha_step = 0.02              # or an explicit list: alpha = [0.3, 0.5, 1.0]
//!
//! [propagator]
//! mode = "auto"                  # auto | exact | krylov
//! krylov_dim = 30
//! krylov_tol = 1e-12
//! krylov_max_step = 0.05
//!
//! [output]
//! dir = "out"
//! formats = ["csv", "json"]
//! plots = true
//! ```
//!
//! A `custom` scenario takes its state from `[initial]`, either
//! `kind = "symmetric"`, a Fock state
//! (`kind = "fock"`, `up = [..]`, `down = [..]`, `doublons = [..]`), or a
//! product of superposed factors:
//!
//! ```toml
//! [initial]
//! kind = "superposition"
//! [[initial.factor]]
//! terms = [{ site = 1, content = "up" }, { site = 8, content = "up", re = -1.0 }]
//! [[initial.factor]]
//! terms = [{ site = 4, content = "doublon" }]
//! ```

use std::path::PathBuf;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use toml::Spanned;

use crate::basis::SectorSpec;
use crate::error::{Error, Result};
use crate::evolution::{KrylovSettings, PropagatorMode, TimeGrid};
use crate::hamiltonian::{BarrierSpec, ModelParams};
use crate::scenarios::{
    AlphaGrid, BiasedConfig, Content, InitialStateSpec, Placement, RunSettings, ScenarioKind, ScenarioSpec,
};

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawConfig {
    scenario: Option<Spanned<String>>,
    configs: Option<Spanned<Vec<String>>>,
    #[serde(default)]
    model: RawModel,
    #[serde(default)]
    time: RawTime,
    scan: Option<Spanned<RawScan>>,
    initial: Option<Spanned<RawInitial>>,
    #[serde(default)]
    propagator: RawPropagator,
    #[serde(default)]
    output: RawOutput,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawModel {
    sites: Option<Spanned<i64>>,
    n_up: Option<Spanned<i64>>,
    n_dn: Option<Spanned<i64>>,
    #[serde(rename = "J")]
    hopping: Option<Spanned<f64>>,
    #[serde(rename = "U")]
    interaction: Option<Spanned<f64>>,
    h: Option<Spanned<f64>>,
    alpha: Option<Spanned<f64>>,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawTime {
    t_max: Option<Spanned<f64>>,
    dt: Option<Spanned<f64>>,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawScan {
    alpha: Option<Vec<f64>>,
    alpha_min: Option<f64>,
    alpha_max: Option<f64>,
    alpha_step: Option<f64>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawInitial {
    kind: String,
    #[serde(default)]
    up: Vec<usize>,
    #[serde(default)]
    down: Vec<usize>,
    #[serde(default)]
    doublons: Vec<usize>,
    #[serde(default)]
    factor: Vec<RawFactor>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawFactor {
    terms: Vec<RawTerm>,
}

#[derive(Debug, Clone, Copy, Deserialize, Serialize, PartialEq)]
#[serde(deny_unknown_fields)]
struct RawTerm {
    site: usize,
    content: Content,
    #[serde(default = "one")]
    re: f64,
    #[serde(default)]
    im: f64,
}

fn one() -> f64 {
    1.0
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawPropagator {
    mode: Option<Spanned<PropagatorMode>>,
    krylov_dim: Option<Spanned<i64>>,
    krylov_tol: Option<Spanned<f64>>,
    krylov_max_step: Option<Spanned<f64>>,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawOutput {
    dir: Option<PathBuf>,
    formats: Option<Spanned<Vec<OutputFormat>>>,
    plots: Option<bool>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum OutputFormat {
    Csv,
    Json,
}

/// Where and what to write.
#[derive(Debug, Clone, PartialEq)]
pub struct OutputSettings {
    /// `None` falls back to `HUBBARD_RING_OUT`, then `out`.
    pub dir: Option<PathBuf>,
    pub formats: Vec<OutputFormat>,
    pub plots: bool,
}

impl Default for OutputSettings {
    fn default() -> Self {
        Self { dir: None, formats: vec![OutputFormat::Csv, OutputFormat::Json], plots: true }
    }
}

/// A validated configuration.
#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub spec: ScenarioSpec,
    pub output: OutputSettings,
}

struct Source<'a> {
    text: &'a str,
}

impl Source<'_> {
    fn line(&self, offset: usize) -> usize {
        self.text[..offset.min(self.text.len())].matches('\n').count() + 1
    }

    fn error<T>(&self, key: &str, spanned: &Spanned<T>, message: impl std::fmt::Display) -> Error {
        Error::Config(format!("{key} (line {}): {message}", self.line(spanned.span().start)))
    }
}

fn take<T: Clone>(v: &Option<Spanned<T>>) -> Option<T> {
    v.as_ref().map(|s| s.get_ref().clone())
}

fn count(src: &Source, key: &str, v: &Option<Spanned<i64>>, default: usize) -> Result<usize> {
    match v {
        None => Ok(default),
        Some(s) if *s.get_ref() >= 0 => Ok(*s.get_ref() as usize),
        Some(s) => Err(src.error(key, s, format!("must be a non-negative integer, got {}", s.get_ref()))),
    }
}

fn real(
    src: &Source,
    key: &str,
    v: &Option<Spanned<f64>>,
    default: f64,
    ok: impl Fn(f64) -> bool,
    requirement: &str,
) -> Result<f64> {
    match v {
        None => Ok(default),
        Some(s) if s.get_ref().is_finite() && ok(*s.get_ref()) => Ok(*s.get_ref()),
        Some(s) => Err(src.error(key, s, format!("{requirement}, got {}", s.get_ref()))),
    }
}

impl RunConfig {
    /// Defaults of the built-in scenario `kind`.
    pub fn defaults(kind: ScenarioKind) -> Self {
        Self { spec: ScenarioSpec::standard(kind), output: OutputSettings::default() }
    }

    /// Parses and validates TOML text. Errors name the offending key and line.
    pub fn parse(text: &str) -> Result<Self> {
        let raw: RawConfig = toml::from_str(text).map_err(|e| {
            let line = e.span().map(|s| format!(" (line {})", Source { text }.line(s.start))).unwrap_or_default();
            Error::Config(format!("invalid config{line}: {}", e.message()))
        })?;
        let src = Source { text };

        let kind = match &raw.scenario {
            None => ScenarioKind::BarrierComparison,
            Some(s) => s
                .get_ref()
                .parse()
                .map_err(|_| src.error("scenario", s, format!("unknown scenario {:?}", s.get_ref())))?,
        };
        let mut spec = ScenarioSpec::standard(kind);

        let m = &raw.model;
        let sites = count(&src, "model.sites", &m.sites, spec.sector.sites())?;
        if let Some(s) = &m.sites {
            if sites % 2 == 1 {
                return Err(src.error("model.sites", s, format!("ring length must be even, got {sites}")));
            }
        }
        let n_up = count(&src, "model.n_up", &m.n_up, spec.sector.n_up())?;
        let n_dn = count(&src, "model.n_dn", &m.n_dn, spec.sector.n_dn())?;
        spec.sector = SectorSpec::new(sites, n_up, n_dn).map_err(|e| {
            let anchor = m.sites.as_ref().or(m.n_up.as_ref()).or(m.n_dn.as_ref());
            match anchor {
                Some(s) => src.error("model", s, e),
                None => Error::Config(format!("model: {e}")),
            }
        })?;

        let d = spec.params;
        let hopping = real(&src, "model.J", &m.hopping, d.hopping, |x| x > 0.0, "must be > 0")?;
        let interaction = real(&src, "model.U", &m.interaction, d.interaction, |_| true, "must be finite")?;
        let height = real(&src, "model.h", &m.h, d.barrier.height, |_| true, "must be finite")?;
        let alpha = real(&src, "model.alpha", &m.alpha, d.barrier.alpha, |x| x >= 0.0, "must be >= 0")?;
        spec.params = ModelParams::new(hopping, interaction, BarrierSpec::new(height, alpha)?)?;
        if let Err(e) = spec.params.barrier.potential(sites) {
            return Err(match &m.sites {
                Some(s) => src.error("model.sites", s, e),
                None => Error::Config(e.to_string()),
            });
        }

        let t = &raw.time;
        let grid = spec.settings.grid;
        let t_max = real(&src, "time.t_max", &t.t_max, grid.t_max(), |x| x > 0.0, "must be > 0")?;
        let dt = real(&src, "time.dt", &t.dt, grid.dt(), |x| x > 0.0, "must be > 0")?;
        spec.settings.grid = TimeGrid::new(t_max, dt).map_err(|e| match (&t.dt, &t.t_max) {
            (Some(s), _) => src.error("time.dt", s, e),
            (None, Some(s)) => src.error("time.t_max", s, e),
            (None, None) => Error::Config(e.to_string()),
        })?;

        let p = &raw.propagator;
        spec.settings.mode = take(&p.mode).unwrap_or_default();
        let k = KrylovSettings::default();
        let subspace = count(&src, "propagator.krylov_dim", &p.krylov_dim, k.subspace)?;
        if let (Some(s), true) = (&p.krylov_dim, subspace < 2) {
            return Err(src.error("propagator.krylov_dim", s, "must be >= 2"));
        }
        spec.settings.krylov = KrylovSettings {
            subspace,
            tolerance: real(&src, "propagator.krylov_tol", &p.krylov_tol, k.tolerance, |x| x > 0.0, "must be > 0")?,
            max_step: real(
                &src,
                "propagator.krylov_max_step",
                &p.krylov_max_step,
                k.max_step,
                |x| x > 0.0,
                "must be > 0",
            )?,
            max_halvings: k.max_halvings,
        };

        if let Some(c) = &raw.configs {
            if !matches!(kind, ScenarioKind::DirectionFlip | ScenarioKind::AlphaScan) {
                return Err(src.error("configs", c, format!("not used by scenario {kind}")));
            }
            let mut configs = Vec::new();
            for name in c.get_ref() {
                let config: BiasedConfig = name
                    .parse()
                    .map_err(|_| src.error("configs", c, format!("unknown configuration {name:?}, expected A or B")))?;
                if configs.contains(&config) {
                    return Err(src.error("configs", c, format!("configuration {name} listed twice")));
                }
                configs.push(config);
            }
            if configs.is_empty() {
                return Err(src.error("configs", c, "needs at least one configuration"));
            }
            spec.configs = configs;
        }

        match (&raw.scan, kind) {
            (Some(s), ScenarioKind::AlphaScan) => {
                let default = AlphaGrid::standard();
                let v = default.values();
                let scan = s.get_ref();
                let range_keys = scan.alpha_min.is_some() || scan.alpha_max.is_some() || scan.alpha_step.is_some();
                let grid = match &scan.alpha {
                    Some(_) if range_keys => {
                        return Err(src.error("scan", s, "give either alpha = [..] or alpha_min/alpha_max/alpha_step"))
                    }
                    Some(values) => AlphaGrid::from_values(values.clone()),
                    None => AlphaGrid::range(
                        scan.alpha_min.unwrap_or(v[0]),
                        scan.alpha_max.unwrap_or(v[v.len() - 1]),
                        scan.alpha_step.unwrap_or(0.02),
                    ),
                }
                .map_err(|e| src.error("scan", s, e))?;
                spec.scan = Some(grid);
            }
            (Some(s), _) => return Err(src.error("scan", s, format!("only valid for alpha-scan, not {kind}"))),
            (None, _) => {}
        }

        match (&raw.initial, kind) {
            (Some(s), ScenarioKind::Custom) => {
                spec.initial = Some(initial_state(s.get_ref()).map_err(|e| src.error("initial", s, e))?);
            }
            (Some(s), _) => {
                return Err(src.error("initial", s, format!("scenario {kind} fixes its own initial state")))
            }
            (None, _) => {}
        }

        let o = &raw.output;
        let mut output = OutputSettings { dir: o.dir.clone(), ..Default::default() };
        if let Some(f) = &o.formats {
            let mut formats = f.get_ref().clone();
            formats.sort();
            formats.dedup();
            if formats.is_empty() {
                return Err(src.error("output.formats", f, "needs at least one of \"csv\", \"json\""));
            }
            output.formats = formats;
        }
        output.plots = o.plots.unwrap_or(true);

        Ok(Self { spec, output })
    }

    /// The configuration with every default spelled out, as TOML.
    pub fn to_toml(&self) -> String {
        let s = &self.spec;
        let resolved = Resolved {
            scenario: s.kind.name().to_string(),
            configs: matches!(s.kind, ScenarioKind::DirectionFlip | ScenarioKind::AlphaScan)
                .then(|| s.configs.iter().map(|c| c.label().to_string()).collect()),
            model: ResolvedModel {
                sites: s.sector.sites(),
                n_up: s.sector.n_up(),
                n_dn: s.sector.n_dn(),
                hopping: s.params.hopping,
                interaction: s.params.interaction,
                h: s.params.barrier.height,
                alpha: s.params.barrier.alpha,
            },
            time: ResolvedTime { t_max: s.settings.grid.t_max(), dt: s.settings.grid.dt() },
            scan: s.scan.as_ref().map(|g| ResolvedScan { alpha: g.values().to_vec() }),
            initial: s.initial.as_ref().map(resolved_initial),
            propagator: ResolvedPropagator {
                mode: s.settings.mode,
                krylov_dim: s.settings.krylov.subspace,
                krylov_tol: s.settings.krylov.tolerance,
                krylov_max_step: s.settings.krylov.max_step,
            },
            output: ResolvedOutput {
                dir: self.output.dir.as_ref().map(|d| d.display().to_string()),
                formats: self.output.formats.clone(),
                plots: self.output.plots,
            },
        };
        toml::to_string(&resolved).expect("resolved config serializes")
    }

    pub fn settings(&self) -> &RunSettings {
        &self.spec.settings
    }
}

fn initial_state(raw: &RawInitial) -> Result<InitialStateSpec> {
    let fock_keys = !(raw.up.is_empty() && raw.down.is_empty() && raw.doublons.is_empty());
    match raw.kind.as_str() {
        "symmetric" if !fock_keys && raw.factor.is_empty() => Ok(InitialStateSpec::SymmetricSuperposition),
        "fock" if raw.factor.is_empty() => {
            let mut items = Vec::new();
            items.extend(raw.doublons.iter().map(|&s| (s, Content::Doublon)));
            items.extend(raw.up.iter().map(|&s| (s, Content::Up)));
            items.extend(raw.down.iter().map(|&s| (s, Content::Down)));
            Ok(InitialStateSpec::ProductFock(items))
        }
        "superposition" if !fock_keys => {
            if raw.factor.is_empty() {
                return Err(Error::InvalidInitialState("superposition needs at least one [[initial.factor]]".into()));
            }
            Ok(InitialStateSpec::Superposition(
                raw.factor
                    .iter()
                    .map(|f| {
                        f.terms
                            .iter()
                            .map(|t| Placement::with_amplitude(t.site, t.content, Complex64::new(t.re, t.im)))
                            .collect()
                    })
                    .collect(),
            ))
        }
        "symmetric" | "fock" | "superposition" => {
            Err(Error::InvalidInitialState(format!("keys of another kind given with kind = {:?}", raw.kind)))
        }
        other => Err(Error::InvalidInitialState(format!(
            "unknown kind {other:?}, expected symmetric, fock or superposition"
        ))),
    }
}

fn resolved_initial(spec: &InitialStateSpec) -> ResolvedInitial {
    match spec {
        InitialStateSpec::SymmetricSuperposition => ResolvedInitial { kind: "symmetric".into(), ..Default::default() },
        InitialStateSpec::ProductFock(items) => {
            let pick = |c: Content| items.iter().filter(|i| i.1 == c).map(|i| i.0).collect();
            ResolvedInitial {
                kind: "fock".into(),
                up: pick(Content::Up),
                down: pick(Content::Down),
                doublons: pick(Content::Doublon),
                factor: Vec::new(),
            }
        }
        InitialStateSpec::Superposition(factors) => ResolvedInitial {
            kind: "superposition".into(),
            factor: factors
                .iter()
                .map(|f| ResolvedFactor {
                    terms: f
                        .iter()
                        .map(|p| RawTerm { site: p.site, content: p.content, re: p.amplitude.re, im: p.amplitude.im })
                        .collect(),
                })
                .collect(),
            ..Default::default()
        },
    }
}

#[derive(Serialize)]
struct Resolved {
    scenario: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    configs: Option<Vec<String>>,
    model: ResolvedModel,
    time: ResolvedTime,
    #[serde(skip_serializing_if = "Option::is_none")]
    scan: Option<ResolvedScan>,
    #[serde(skip_serializing_if = "Option::is_none")]
    initial: Option<ResolvedInitial>,
    propagator: ResolvedPropagator,
    output: ResolvedOutput,
}

#[derive(Serialize)]
struct ResolvedModel {
    sites: usize,
    n_up: usize,
    n_dn: usize,
    #[serde(rename = "J")]
    hopping: f64,
    #[serde(rename = "U")]
    interaction: f64,
    h: f64,
    alpha: f64,
}

#[derive(Serialize)]
struct ResolvedTime {
    t_max: f64,
    dt: f64,
}

/// The scan is echoed as its explicit list of values.
#[derive(Serialize)]
struct ResolvedScan {
    alpha: Vec<f64>,
}

#[derive(Serialize, Default)]
struct ResolvedInitial {
    kind: String,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    up: Vec<usize>,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    down: Vec<usize>,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    doublons: Vec<usize>,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    factor: Vec<ResolvedFactor>,
}

#[derive(Serialize)]
struct ResolvedFactor {
    terms: Vec<RawTerm>,
}

#[derive(Serialize)]
struct ResolvedPropagator {
    mode: PropagatorMode,
    krylov_dim: usize,
    krylov_tol: f64,
    krylov_max_step: f64,
}

#[derive(Serialize)]
struct ResolvedOutput {
    #[serde(skip_serializing_if = "Option::is_none")]
    dir: Option<String>,
    formats: Vec<OutputFormat>,
    plots: bool,
}

#[cfg(test)]
mod tests {
    use super::*;

    fn err(text: &str) -> String {
        match RunConfig::parse(text) {
            Err(Error::Config(msg)) => msg,
            other => panic!("expected config error, got {other:?}"),
        }
    }

    #[test]
    fn empty_config_is_the_default_comparison() {
        let cfg = RunConfig::parse("").unwrap();
        assert_eq!(cfg, RunConfig::defaults(ScenarioKind::BarrierComparison));
        assert_eq!(cfg.spec.params.barrier.potential(8).unwrap(), vec![0.0, 20.0, 10.0, 0.0, 0.0, 20.0, 10.0, 0.0]);
        assert_eq!(cfg.spec.settings.grid.len(), 801);
    }

    #[test]
    fn validation_errors_name_key_and_line() {
        let msg = err("scenario = \"barrier-comparison\"\n[model]\nalpha = -0.5\n");
        assert!(msg.contains("model.alpha") && msg.contains("line 3"), "{msg}");
        let msg = err("[model]\nsites = 7\n");
        assert!(msg.contains("model.sites") && msg.contains("line 2") && msg.contains("even"), "{msg}");
        let msg = err("[model]\n\nJ = 0.0\n");
        assert!(msg.contains("model.J") && msg.contains("line 3"), "{msg}");
        let msg = err("[model]\nbogus = 1\n");
        assert!(msg.contains("bogus") && msg.contains("line 2"), "{msg}");
        let msg = err("[time]\ndt = 0.03\n");
        assert!(msg.contains("time.dt"), "{msg}");
        let msg = err("scenario = \"fig2\"\n");
        assert!(msg.contains("scenario") && msg.contains("line 1"), "{msg}");
        let msg = err("[scan]\nalpha_min = 0.1\n");
        assert!(msg.contains("scan"), "{msg}");
        let msg = err("scenario = \"direction-flip\"\nconfigs = [\"C\"]\n");
        assert!(msg.contains("configs"), "{msg}");
        let msg = err("[model\n");
        assert!(msg.contains("line 1"), "{msg}");
    }

    #[test]
    fn resolved_config_round_trips() {
        let text = "scenario = \"alpha-scan\"\nconfigs = [\"B\"]\n[scan]\nalpha_min = 0.4\nalpha_max = 0.6\nalpha_step = 0.1\n[time]\nt_max = 4.0\n";
        let cfg = RunConfig::parse(text).unwrap();
        assert_eq!(cfg.spec.scan.as_ref().unwrap().values(), &[0.4, 0.5, 0.6]);
        let echo = cfg.to_toml();
        assert!(echo.contains("alpha = [0.4, 0.5, 0.6]"), "{echo}");
        assert_eq!(RunConfig::parse(&echo).unwrap(), cfg);
        assert!(err("scenario = \"alpha-scan\"\n[scan]\nalpha = [0.5]\nalpha_min = 0.1\n").contains("scan"));
    }

    #[test]
    fn custom_initial_states() {
        let cfg =
            RunConfig::parse("scenario = \"custom\"\n[initial]\nkind = \"fock\"\ndoublons = [4]\nup = [8]\n").unwrap();
        assert_eq!(
            cfg.spec.initial,
            Some(InitialStateSpec::ProductFock(vec![(4, Content::Doublon), (8, Content::Up)]))
        );
        let cfg = RunConfig::parse(
            "scenario = \"custom\"\n[initial]\nkind = \"superposition\"\n[[initial.factor]]\nterms = [{ site = 1, content = \"up\" }, { site = 8, content = \"up\", im = 1.0, re = 0.0 }]\n[[initial.factor]]\nterms = [{ site = 4, content = \"doublon\" }]\n",
        )
        .unwrap();
        let InitialStateSpec::Superposition(f) = cfg.spec.initial.clone().unwrap() else { panic!() };
        assert_eq!(f[0][1].amplitude, Complex64::new(0.0, 1.0));
        assert!(cfg.to_toml().contains("superposition"));
        assert!(err("[initial]\nkind = \"symmetric\"\n").contains("initial"));
        assert!(err("scenario = \"custom\"\n[initial]\nkind = \"fock\"\nup = [1]\n[[initial.factor]]\nterms = []\n")
            .contains("initial"));
    }
}
