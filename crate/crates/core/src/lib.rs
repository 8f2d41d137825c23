//! Spin-resolved transport in a one-dimensional Fermi-Hubbard ring with
//! static, spin-independent asymmetric barriers.
//!
//! The ring has `L` sites with periodic boundaries and
//!
//! ```text
//! H = -J Σ_{i,σ} (c†_{iσ} c_{i+1,σ} + h.c.) + U Σ_i n_{i↑} n_{i↓} + Σ_i h_i n_i
//! ```
//!
//! where the barrier puts `h` on sites 2 and `L/2 + 2` and `alpha·h` on sites 3
//! and `L/2 + 3`. Dynamics are computed exactly in a fixed `(N_up, N_dn)`
//! sector, either by full diagonalization or by a Lanczos propagator.
//!
//! Modules, bottom up:
//!
//! * [`basis`]: Fock states as bit masks, sector enumeration, fermionic hops.
//! * [`hamiltonian`]: barrier potential, sparse Hamiltonian, number and
//!   site-permutation operators.
//! * [`evolution`]: states, time grids, exact and Krylov propagators.
//! * [`observables`]: spin-resolved currents, transferred charge, densities,
//!   continuity check.
//! * [`scenarios`]: initial states and the barrier-comparison, direction-flip
//!   and alpha-scan experiments.
//! * [`cli`]: TOML configs, CSV/JSON output, SVG plots.
//!
//! Runnable examples live in `examples/`: `barrier_comparison`,
//! `direction_flip`, `alpha_scan`, `krylov_vs_exact`, `fock_basis`,
//! `two_site_rabi`, `continuity` and `config_run`.
//!
//! ```
//! use hubbard_ring::prelude::*;
//!
//! let basis = std::sync::Arc::new(SectorBasis::enumerate(SectorSpec::standard()));
//! let h = build_hamiltonian(&basis, &ModelParams::standard()).unwrap();
//! assert_eq!(basis.dim(), 224);
//! assert!(h.is_hermitian());
//! ```

pub mod basis;
pub mod cli;
pub mod error;
pub mod evolution;
pub mod hamiltonian;
pub mod observables;
pub mod operator;
pub mod scenarios;
pub mod selftest;

pub use error::{Error, Result};

/// The types most programs need.
pub mod prelude {
    pub use crate::basis::{FockState, SectorBasis, SectorSpec, Spin};
    pub use crate::error::{Error, Result};
    pub use crate::evolution::{
        evolve, ExactPropagator, KrylovSettings, Propagator, PropagatorMode, QuantumState, TimeGrid,
    };
    pub use crate::hamiltonian::{build_hamiltonian, BarrierSpec, ModelParams};
    pub use crate::observables::{
        build_current_operators, continuity_check, final_half_mean, measure, transferred_charge, TimeSeriesRecord,
    };
    pub use crate::scenarios::{
        build_initial_state, run_alpha_scan, run_barrier_comparison, run_direction_flip, AlphaGrid, BiasedConfig,
        Content, InitialStateSpec, Placement, Run, RunSettings,
    };
}
