//! Study drivers built on the two solvers: run loops with diagnostics,
//! perturbation stability, vanishing-noise sweeps and particle/grid
//! cross-validation.

mod crossval;
pub mod fit;
mod runner;
mod scenario;
mod stability;
mod study;
mod sweep;

pub use crossval::{run_cross_validation, CrossReport, CrossRow};
pub use runner::{
    run_grid, run_grid_observed, run_particles, run_particles_observed, GridRun, ParticleRun,
    RunOptions, BOUNDARY_MASS_WARNING,
};
pub use scenario::{Scenario, BUILTIN_SCENARIOS};
pub use stability::{perturbation_bump, run_stability, run_stability_with_bump, StabilityReport};
pub use study::{NormKind, StudyKind, StudySpec};
pub use sweep::{adjacent_ratios, is_monotone, run_sigma_sweep, SweepReport, MONOTONE_TOLERANCE};
