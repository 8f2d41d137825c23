//! Initial states and the three transport experiments.
//!
//! * `barrier-comparison`: the reflection-symmetric superposition
//!   `½(|↑⟩₁ + |↑⟩₈) ⊗ (|↑↓⟩₄ + |↑↓⟩₅)` evolved under asymmetric
//!   (`alpha = 0.5`) and symmetric (`alpha = 1`) barriers.
//! * `direction-flip`: a doublon next to one of the two barrier steps with the
//!   unpaired up fermion on the far side of the ring ([`BiasedConfig`]).
//! * `alpha-scan`: the biased configurations over a grid of asymmetries.
//!
//! Every run is independent, so scan points and configurations are
//! evaluated in parallel and merged in input order.

use std::fmt;
use std::str::FromStr;
use std::sync::Arc;

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::basis::{FockState, SectorBasis, SectorSpec, Spin};
use crate::error::{Error, Result};
use crate::evolution::{evolve, KrylovSettings, Propagator, PropagatorMode, QuantumState, TimeGrid};
use crate::hamiltonian::{build_hamiltonian, ModelParams};
use crate::observables::{build_current_operators, final_half_mean, measure, TimeSeriesRecord};

/// What a placement puts on a site.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Content {
    Up,
    Down,
    Doublon,
}

/// One term of a single-site factor: `amplitude · |content⟩_site`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Placement {
    pub site: usize,
    pub content: Content,
    pub amplitude: Complex64,
}

impl Placement {
    pub fn new(site: usize, content: Content) -> Self {
        Self { site, content, amplitude: Complex64::new(1.0, 0.0) }
    }

    pub fn with_amplitude(site: usize, content: Content, amplitude: Complex64) -> Self {
        Self { site, content, amplitude }
    }
}

/// How to prepare `|Ψ(0)⟩`.
///
/// A superposition is a product of factors, each factor a sum of
/// placements; the product is expanded onto the canonical Fock basis
/// (spin-up operators in site order, then spin-down) and normalized.
#[derive(Debug, Clone, PartialEq)]
pub enum InitialStateSpec {
    /// `½(|↑⟩₁ + |↑⟩_L) ⊗ (|↑↓⟩_{L/2} + |↑↓⟩_{L/2+1})`, symmetric with respect
    /// to the barriers. Needs `L >= 8`.
    SymmetricSuperposition,
    /// A single Fock state.
    ProductFock(Vec<(usize, Content)>),
    Superposition(Vec<Vec<Placement>>),
}

impl InitialStateSpec {
    fn factors(&self, sites: usize) -> Result<Vec<Vec<Placement>>> {
        match self {
            InitialStateSpec::SymmetricSuperposition => {
                if sites < 8 || sites % 2 == 1 {
                    return Err(Error::InvalidInitialState(format!(
                        "the symmetric superposition needs an even ring with L >= 8, got L = {sites}"
                    )));
                }
                let half = sites / 2;
                Ok(vec![
                    vec![Placement::new(1, Content::Up), Placement::new(sites, Content::Up)],
                    vec![Placement::new(half, Content::Doublon), Placement::new(half + 1, Content::Doublon)],
                ])
            }
            InitialStateSpec::ProductFock(items) => {
                Ok(items.iter().map(|&(site, content)| vec![Placement::new(site, content)]).collect())
            }
            InitialStateSpec::Superposition(factors) => Ok(factors.clone()),
        }
    }
}

fn place(state: FockState, p: &Placement, sites: usize) -> Result<FockState> {
    if p.site == 0 || p.site > sites {
        return Err(Error::SiteOutOfRange { site: p.site, sites });
    }
    let bit = 1u64 << (p.site - 1);
    let (add_up, add_dn) = match p.content {
        Content::Up => (true, false),
        Content::Down => (false, true),
        Content::Doublon => (true, true),
    };
    if (add_up && state.up & bit != 0) || (add_dn && state.dn & bit != 0) {
        return Err(Error::InvalidInitialState(format!("two fermions of the same spin placed on site {}", p.site)));
    }
    Ok(FockState::new(state.up | if add_up { bit } else { 0 }, state.dn | if add_dn { bit } else { 0 }))
}

/// Expands `spec` onto `basis` and normalizes.
pub fn build_initial_state(spec: &InitialStateSpec, basis: Arc<SectorBasis>) -> Result<QuantumState> {
    let sites = basis.sites();
    let factors = spec.factors(sites)?;
    if factors.iter().any(Vec::is_empty) {
        return Err(Error::InvalidInitialState("empty factor in superposition".into()));
    }
    let mut terms = vec![(FockState::default(), Complex64::new(1.0, 0.0))];
    for factor in &factors {
        let mut next = Vec::with_capacity(terms.len() * factor.len());
        for (state, amp) in &terms {
            for p in factor {
                next.push((place(*state, p, sites)?, amp * p.amplitude));
            }
        }
        terms = next;
    }
    let mut amps = vec![Complex64::default(); basis.dim()];
    for (state, amp) in terms {
        let k = basis.index_of(&state).ok_or_else(|| {
            Error::InvalidInitialState(format!("component {state} lies outside sector {}", basis.spec()))
        })?;
        amps[k] += amp;
    }
    QuantumState::normalized(basis, amps)
}

/// Biased initial configurations: a doublon beside one barrier step, the
/// unpaired up fermion diametrically opposite (three sites in between).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum BiasedConfig {
    /// Doublon on site 4, next to the `alpha·h` site 3; up fermion on site `4 + L/2`.
    A,
    /// Doublon on site `L/2 + 1`, next to the `h` site `L/2 + 2`; up fermion on site 1.
    B,
}

impl BiasedConfig {
    pub const BOTH: [BiasedConfig; 2] = [BiasedConfig::A, BiasedConfig::B];

    pub fn label(self) -> &'static str {
        match self {
            BiasedConfig::A => "A",
            BiasedConfig::B => "B",
        }
    }

    /// `(doublon site, unpaired up site)`, 1-based.
    pub fn sites(self, ring: usize) -> (usize, usize) {
        let half = ring / 2;
        match self {
            BiasedConfig::A => (4, 4 + half),
            BiasedConfig::B => (half + 1, 1),
        }
    }

    pub fn initial_state(self, ring: usize) -> InitialStateSpec {
        let (doublon, up) = self.sites(ring);
        InitialStateSpec::ProductFock(vec![(doublon, Content::Doublon), (up, Content::Up)])
    }
}

impl fmt::Display for BiasedConfig {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.label())
    }
}

impl FromStr for BiasedConfig {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "A" | "a" => Ok(BiasedConfig::A),
            "B" | "b" => Ok(BiasedConfig::B),
            other => Err(Error::Config(format!("unknown configuration {other:?}, expected A or B"))),
        }
    }
}

/// Strictly increasing list of asymmetry values.
#[derive(Debug, Clone, PartialEq)]
pub struct AlphaGrid {
    values: Vec<f64>,
}

impl AlphaGrid {
    /// `min, min + step, ..., max` (inclusive to 1e-9), rounded to 12 decimals
    /// so that e.g. 0.5 is hit exactly.
    pub fn range(min: f64, max: f64, step: f64) -> Result<Self> {
        if !(min.is_finite() && max.is_finite() && min >= 0.0) {
            return Err(Error::InvalidParams(format!("alpha range [{min}, {max}] must be finite and >= 0")));
        }
        if !(step.is_finite() && step > 0.0) || max < min {
            return Err(Error::InvalidParams(format!(
                "alpha grid needs max >= min and step > 0 (min = {min}, max = {max}, step = {step})"
            )));
        }
        let count = ((max - min) / step + 1e-9).floor() as usize + 1;
        let values = (0..count).map(|k| ((min + k as f64 * step) * 1e12).round() / 1e12).collect();
        Ok(Self { values })
    }

    pub fn from_values(values: Vec<f64>) -> Result<Self> {
        if values.is_empty() || values.windows(2).any(|w| w[1] <= w[0]) || values.iter().any(|a| a.is_nan() || *a < 0.0)
        {
            return Err(Error::InvalidParams("alpha values must be >= 0 and strictly increasing".into()));
        }
        Ok(Self { values })
    }

    /// `0.1, 0.12, ..., 1.2`.
    pub fn standard() -> Self {
        Self::range(0.1, 1.2, 0.02).expect("valid default grid")
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }
}

/// Time grid and propagator choice shared by every run of a scenario.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RunSettings {
    pub grid: TimeGrid,
    pub mode: PropagatorMode,
    pub krylov: KrylovSettings,
}

impl Default for RunSettings {
    fn default() -> Self {
        Self { grid: TimeGrid::standard(), mode: PropagatorMode::Auto, krylov: KrylovSettings::default() }
    }
}

/// One evolved trajectory.
#[derive(Debug, Clone, PartialEq)]
pub struct Run {
    pub label: String,
    pub alpha: f64,
    pub records: Vec<TimeSeriesRecord>,
}

impl Run {
    /// Time-averaged transferred charge over the final half of the window.
    pub fn qbar(&self, spin: Spin) -> f64 {
        let q: Vec<f64> = self.records.iter().map(|r| r.charge(spin)).collect();
        final_half_mean(&q)
    }

    pub fn max_abs_charge(&self, spin: Spin) -> f64 {
        self.records.iter().map(|r| r.charge(spin).abs()).fold(0.0, f64::max)
    }

    /// Spin-up and spin-down move in opposite directions on average.
    pub fn counter_propagating(&self) -> bool {
        self.qbar(Spin::Up) * self.qbar(Spin::Down) < 0.0
    }

    /// Largest deviations of the conserved quantities from their initial values.
    pub fn conservation(&self) -> Conservation {
        let Some(first) = self.records.first() else {
            return Conservation::default();
        };
        let count = |r: &TimeSeriesRecord, spin| r.density_of(spin).iter().sum::<f64>();
        let e_scale = first.energy.abs().max(1.0);
        self.records.iter().fold(Conservation::default(), |acc, r| Conservation {
            norm: acc.norm.max((r.norm - 1.0).abs()),
            energy: acc.energy.max((r.energy - first.energy).abs() / e_scale),
            particles: Spin::BOTH
                .into_iter()
                .map(|s| (count(r, s) - count(first, s)).abs())
                .fold(acc.particles, f64::max),
        })
    }
}

/// Maximum drifts over a trajectory: `|‖ψ‖ - 1|`, relative energy change
/// (relative to `max(|E(0)|, 1)`), and change of either spin's particle number.
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct Conservation {
    pub norm: f64,
    pub energy: f64,
    pub particles: f64,
}

/// Evolves one initial state and measures all observables.
pub fn simulate(
    basis: &Arc<SectorBasis>,
    params: &ModelParams,
    initial: &InitialStateSpec,
    settings: &RunSettings,
) -> Result<Vec<TimeSeriesRecord>> {
    let h = build_hamiltonian(basis, params)?;
    let psi0 = build_initial_state(initial, basis.clone())?;
    let propagator = Propagator::for_mode(settings.mode, &h, settings.krylov)?;
    let states = evolve(&psi0, &h, &settings.grid, &propagator)?;
    let currents = build_current_operators(basis, params.hopping)?;
    measure(&states, &h, &currents, &settings.grid)
}

fn check_standard_sector(sector: &SectorSpec) -> Result<()> {
    if sector.n_up() != 2 || sector.n_dn() != 1 || sector.sites() < 8 || sector.sites() % 2 == 1 {
        return Err(Error::InvalidSector(format!(
            "built-in scenarios need an even ring L >= 8 with N_up = 2, N_dn = 1 (got {sector})"
        )));
    }
    Ok(())
}

#[derive(Debug, Clone, PartialEq)]
pub struct BarrierComparison {
    pub asymmetric: Run,
    pub symmetric: Run,
}

/// The symmetric superposition under `params.barrier.alpha` and under `alpha = 1`.
pub fn run_barrier_comparison(
    sector: SectorSpec,
    params: &ModelParams,
    settings: &RunSettings,
) -> Result<BarrierComparison> {
    check_standard_sector(&sector)?;
    let basis = Arc::new(SectorBasis::enumerate(sector));
    let initial = InitialStateSpec::SymmetricSuperposition;
    let alphas = [params.barrier.alpha, 1.0];
    let mut runs = alphas
        .par_iter()
        .map(|&alpha| {
            let mut p = *params;
            p.barrier.alpha = alpha;
            let records = simulate(&basis, &p, &initial, settings)?;
            Ok(Run { label: format!("alpha-{alpha}"), alpha, records })
        })
        .collect::<Result<Vec<_>>>()?;
    let symmetric = runs.pop().expect("two runs");
    let asymmetric = runs.pop().expect("two runs");
    Ok(BarrierComparison { asymmetric, symmetric })
}

/// One biased configuration at `params.barrier.alpha`.
pub fn run_direction_flip(
    config: BiasedConfig,
    sector: SectorSpec,
    params: &ModelParams,
    settings: &RunSettings,
) -> Result<Run> {
    check_standard_sector(&sector)?;
    let basis = Arc::new(SectorBasis::enumerate(sector));
    let records = simulate(&basis, params, &config.initial_state(sector.sites()), settings)?;
    Ok(Run { label: config.label().to_string(), alpha: params.barrier.alpha, records })
}

/// Scan summary for one asymmetry value.
#[derive(Debug, Clone, PartialEq)]
pub struct ScanPoint {
    pub alpha: f64,
    pub qbar_up: f64,
    pub qbar_dn: f64,
    pub run: Run,
}

impl ScanPoint {
    pub fn counter_propagating(&self) -> bool {
        self.qbar_up * self.qbar_dn < 0.0
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct AlphaScan {
    pub config: BiasedConfig,
    pub points: Vec<ScanPoint>,
}

impl AlphaScan {
    /// Asymmetries at which the two spin species counter-propagate.
    pub fn counter_window(&self) -> Vec<f64> {
        self.points.iter().filter(|p| p.counter_propagating()).map(|p| p.alpha).collect()
    }
}

/// Runs `config` at every asymmetry of `alphas`; other parameters from `params`.
pub fn run_alpha_scan(
    alphas: &AlphaGrid,
    config: BiasedConfig,
    sector: SectorSpec,
    params: &ModelParams,
    settings: &RunSettings,
) -> Result<AlphaScan> {
    check_standard_sector(&sector)?;
    let basis = Arc::new(SectorBasis::enumerate(sector));
    let initial = config.initial_state(sector.sites());
    let points = alphas
        .values()
        .par_iter()
        .map(|&alpha| {
            let mut p = *params;
            p.barrier.alpha = alpha;
            let records = simulate(&basis, &p, &initial, settings)?;
            let run = Run { label: format!("{}_alpha-{alpha}", config.label()), alpha, records };
            Ok(ScanPoint { alpha, qbar_up: run.qbar(Spin::Up), qbar_dn: run.qbar(Spin::Down), run })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(AlphaScan { config, points })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ScenarioKind {
    BarrierComparison,
    DirectionFlip,
    AlphaScan,
    Custom,
}

impl ScenarioKind {
    pub const ALL: [ScenarioKind; 4] =
        [ScenarioKind::BarrierComparison, ScenarioKind::DirectionFlip, ScenarioKind::AlphaScan, ScenarioKind::Custom];

    pub fn name(self) -> &'static str {
        match self {
            ScenarioKind::BarrierComparison => "barrier-comparison",
            ScenarioKind::DirectionFlip => "direction-flip",
            ScenarioKind::AlphaScan => "alpha-scan",
            ScenarioKind::Custom => "custom",
        }
    }

    pub fn description(self) -> &'static str {
        match self {
            ScenarioKind::BarrierComparison => {
                "symmetric initial superposition under asymmetric (alpha) vs symmetric (alpha = 1) barriers"
            }
            ScenarioKind::DirectionFlip => {
                "doublon beside the alpha*h step (A) or the h step (B), unpaired up fermion opposite"
            }
            ScenarioKind::AlphaScan => "configurations A/B over a grid of barrier asymmetries",
            ScenarioKind::Custom => "single run from an explicit [initial] state",
        }
    }
}

impl fmt::Display for ScenarioKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for ScenarioKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        ScenarioKind::ALL
            .into_iter()
            .find(|k| k.name() == s)
            .ok_or_else(|| Error::Config(format!("unknown scenario {s:?}")))
    }
}

/// Fully resolved description of a scenario run.
#[derive(Debug, Clone, PartialEq)]
pub struct ScenarioSpec {
    pub kind: ScenarioKind,
    pub sector: SectorSpec,
    pub params: ModelParams,
    /// Used by [`ScenarioKind::Custom`] only; the built-in scenarios fix their states.
    pub initial: Option<InitialStateSpec>,
    pub settings: RunSettings,
    pub configs: Vec<BiasedConfig>,
    /// Present only for [`ScenarioKind::AlphaScan`].
    pub scan: Option<AlphaGrid>,
}

impl ScenarioSpec {
    /// Standard parameters for a scenario kind.
    pub fn standard(kind: ScenarioKind) -> Self {
        Self {
            kind,
            sector: SectorSpec::standard(),
            params: ModelParams::standard(),
            initial: (kind == ScenarioKind::Custom).then_some(InitialStateSpec::SymmetricSuperposition),
            settings: RunSettings::default(),
            configs: BiasedConfig::BOTH.to_vec(),
            scan: (kind == ScenarioKind::AlphaScan).then(AlphaGrid::standard),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum ScenarioOutput {
    BarrierComparison(BarrierComparison),
    DirectionFlip(Vec<Run>),
    AlphaScan(Vec<AlphaScan>),
    Custom(Run),
}

impl ScenarioOutput {
    /// Every trajectory produced, in output order.
    pub fn runs(&self) -> Vec<&Run> {
        match self {
            ScenarioOutput::BarrierComparison(c) => vec![&c.asymmetric, &c.symmetric],
            ScenarioOutput::DirectionFlip(runs) => runs.iter().collect(),
            ScenarioOutput::AlphaScan(scans) => scans.iter().flat_map(|s| s.points.iter().map(|p| &p.run)).collect(),
            ScenarioOutput::Custom(run) => vec![run],
        }
    }
}

pub fn run_scenario(spec: &ScenarioSpec) -> Result<ScenarioOutput> {
    let settings = &spec.settings;
    match spec.kind {
        ScenarioKind::BarrierComparison => {
            run_barrier_comparison(spec.sector, &spec.params, settings).map(ScenarioOutput::BarrierComparison)
        }
        ScenarioKind::DirectionFlip => spec
            .configs
            .par_iter()
            .map(|&c| run_direction_flip(c, spec.sector, &spec.params, settings))
            .collect::<Result<Vec<_>>>()
            .map(ScenarioOutput::DirectionFlip),
        ScenarioKind::AlphaScan => {
            let grid = spec.scan.clone().unwrap_or_else(AlphaGrid::standard);
            spec.configs
                .iter()
                .map(|&c| run_alpha_scan(&grid, c, spec.sector, &spec.params, settings))
                .collect::<Result<Vec<_>>>()
                .map(ScenarioOutput::AlphaScan)
        }
        ScenarioKind::Custom => {
            let basis = Arc::new(SectorBasis::enumerate(spec.sector));
            let initial = spec.initial.clone().unwrap_or(InitialStateSpec::SymmetricSuperposition);
            let records = simulate(&basis, &spec.params, &initial, settings)?;
            Ok(ScenarioOutput::Custom(Run { label: "custom".into(), alpha: spec.params.barrier.alpha, records }))
        }
    }
}
