//! Invariant checks on the default ring, run by `hubbard-ring selftest`.

use std::sync::Arc;

use crate::basis::{binomial, SectorBasis, SectorSpec, Spin};
use crate::error::Result;
use crate::evolution::{evolve, KrylovSettings, Propagator, TimeGrid};
use crate::hamiltonian::{build_hamiltonian, reflection, ModelParams};
use crate::observables::{build_current_operators, continuity_check, measure};
use crate::scenarios::{build_initial_state, run_barrier_comparison, InitialStateSpec, RunSettings};

#[derive(Debug, Clone, PartialEq)]
pub struct Check {
    pub name: &'static str,
    pub passed: bool,
    pub detail: String,
}

impl Check {
    fn new(name: &'static str, passed: bool, detail: String) -> Self {
        Self { name, passed, detail }
    }
}

fn commutator_norm(a: &nalgebra::DMatrix<f64>, b: &nalgebra::DMatrix<f64>) -> f64 {
    (a * b - b * a).amax()
}

/// Runs every check; an `Err` means a check could not be evaluated at all.
pub fn run_selftest() -> Result<Vec<Check>> {
    let spec = SectorSpec::standard();
    let basis = Arc::new(SectorBasis::enumerate(spec));
    let mut checks = Vec::new();

    let dim = binomial(8, 2) * binomial(8, 1);
    checks.push(Check::new("sector dimension", basis.dim() == dim, format!("{} (expected {dim})", basis.dim())));

    let h = build_hamiltonian(&basis, &ModelParams::standard())?;
    let defect = h.hermiticity_defect();
    checks.push(Check::new("hamiltonian symmetric", defect == 0.0, format!("max |H - H^T| = {defect:e}")));

    let r = reflection(&basis).to_dense_real();
    let sym = commutator_norm(&r, &build_hamiltonian(&basis, &ModelParams::with_alpha(1.0))?.to_dense_real());
    let asym = commutator_norm(&r, &h.to_dense_real());
    checks.push(Check::new(
        "reflection symmetry only at alpha = 1",
        sym == 0.0 && asym > 1.0,
        format!("|[R,H]| = {sym:e} (alpha = 1), {asym:e} (alpha = 0.5)"),
    ));

    let cmp = run_barrier_comparison(spec, &ModelParams::standard(), &RunSettings::default())?;
    let null = Spin::BOTH.map(|s| cmp.symmetric.max_abs_charge(s)).into_iter().fold(0.0, f64::max);
    let active = Spin::BOTH.map(|s| cmp.asymmetric.max_abs_charge(s)).into_iter().fold(f64::INFINITY, f64::min);
    checks.push(Check::new("symmetric barrier carries no charge", null <= 1e-9, format!("max |Q| = {null:e}")));
    checks.push(Check::new(
        "asymmetric barrier carries charge",
        active >= 1e3 * null.max(1e-12),
        format!("min over spins of max |Q| = {active:.4}"),
    ));

    for run in [&cmp.asymmetric, &cmp.symmetric] {
        let c = run.conservation();
        checks.push(Check::new(
            "conservation",
            c.norm <= 1e-10 && c.energy <= 1e-9 && c.particles <= 1e-9,
            format!(
                "alpha = {}: norm {:.1e}, energy {:.1e}, particles {:.1e}",
                run.alpha, c.norm, c.energy, c.particles
            ),
        ));
    }

    let psi0 = build_initial_state(&InitialStateSpec::SymmetricSuperposition, basis.clone())?;
    let short = TimeGrid::new(5.0, 0.05)?;
    let exact = evolve(&psi0, &h, &short, &Propagator::exact(&h)?)?;
    let krylov = evolve(&psi0, &h, &short, &Propagator::krylov(KrylovSettings::default()))?;
    let diff = exact.iter().zip(&krylov).map(|(a, b)| a.max_abs_diff(b)).fold(0.0, f64::max);
    checks.push(Check::new("krylov matches exact", diff <= 1e-8, format!("max amplitude difference {diff:e}")));

    let currents = build_current_operators(&basis, 1.0)?;
    let mut residuals = Vec::new();
    for dt in [0.05, 0.025] {
        let grid = TimeGrid::new(5.0, dt)?;
        let states = evolve(&psi0, &h, &grid, &Propagator::exact(&h)?)?;
        residuals.push(continuity_check(&measure(&states, &h, &currents, &grid)?, &grid)?);
    }
    let ratio = residuals[0] / residuals[1];
    checks.push(Check::new(
        "continuity residual is second order",
        (3.5..=4.5).contains(&ratio),
        format!("residual ratio {ratio:.3} (dt 0.05 vs 0.025)"),
    ));

    Ok(checks)
}
