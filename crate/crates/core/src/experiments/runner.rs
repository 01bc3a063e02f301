use log::warn;

use crate::diagnostics::{dissipation_rate, grid_record, particle_record, DiagnosticsSeries};
use crate::error::{Error, Result};
use crate::grid::{GridSolver, PhaseGrid};
use crate::model::{alignment_field_grid_with, KernelSpec, WeightSpec};
use crate::particle::{
    dissipation_from_forces, forces, step_deterministic_with, step_stochastic_with, FieldHistory,
    NoiseStream, ParticleEnsemble,
};
use crate::scalar::Real;

/// Fraction of the initial mass in the outermost cells above which a run is
/// flagged as losing mass through the truncated domain.
pub const BOUNDARY_MASS_WARNING: f64 = 1e-8;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct RunOptions {
    /// Record diagnostics every `cadence` steps (the last step is always recorded).
    pub cadence: usize,
    /// Keep the alignment fields of every step (grid runs only).
    pub record_fields: bool,
    /// Keep the velocity diameter after every step (particle runs only).
    pub track_diameter: bool,
}

impl Default for RunOptions {
    fn default() -> Self {
        Self {
            cadence: 10,
            record_fields: false,
            track_diameter: false,
        }
    }
}

impl RunOptions {
    pub fn every(cadence: usize) -> Self {
        Self {
            cadence,
            ..Self::default()
        }
    }

    fn records_step(&self, n: usize, steps: usize) -> bool {
        n == steps || n.is_multiple_of(self.cadence.max(1))
    }
}

#[derive(Clone, Debug)]
pub struct GridRun<T> {
    pub series: DiagnosticsSeries<T>,
    pub state: PhaseGrid<T>,
    pub fields: Option<FieldHistory<T>>,
    /// Set once boundary-cell mass exceeded [`BOUNDARY_MASS_WARNING`] of the initial mass.
    pub boundary_warning: bool,
}

pub fn run_grid<T: Real>(
    f0: PhaseGrid<T>,
    solver: &GridSolver<T>,
    weights: &WeightSpec<T>,
    steps: usize,
    opts: &RunOptions,
) -> Result<GridRun<T>> {
    run_grid_observed(f0, solver, weights, steps, opts, |_| Ok(()))
}

/// Like [`run_grid`], calling `observe` on the state at every recorded output.
pub fn run_grid_observed<T: Real>(
    f0: PhaseGrid<T>,
    solver: &GridSolver<T>,
    weights: &WeightSpec<T>,
    steps: usize,
    opts: &RunOptions,
    mut observe: impl FnMut(&PhaseGrid<T>) -> Result<()>,
) -> Result<GridRun<T>> {
    let k = &solver.kernel;
    let m0 = f0.mass();
    let limit = m0 * T::lit(BOUNDARY_MASS_WARNING);
    let mut boundary_warning = false;
    let mut series = DiagnosticsSeries::new();
    let mut fields = if opts.record_fields {
        let mut h = FieldHistory::new();
        h.push(f0.t(), alignment_field_grid_with(&f0, k, solver.field_method)?)?;
        Some(h)
    } else {
        None
    };

    let t0 = f0.t();
    let mut f = f0;
    let mut record = |f: &PhaseGrid<T>, cumulative: T, series: &mut DiagnosticsSeries<T>| -> Result<()> {
        let mut r = grid_record(f, k, weights)?;
        r.cumulative_dissipation = cumulative;
        if !boundary_warning && f.boundary_mass() > limit {
            boundary_warning = true;
            warn!(
                "boundary cells hold {} of mass {} at t = {}; the domain may be too small",
                f.boundary_mass(),
                m0,
                f.t()
            );
        }
        series.push(r)?;
        observe(f)
    };

    let mut d_prev = dissipation_rate(&f, k)?;
    let mut cumulative = T::zero();
    record(&f, cumulative, &mut series)?;
    for n in 1..=steps {
        f = solver.step(&f)?;
        f.set_t(t0 + T::from_count(n) * solver.dt);
        if !f.max_value().is_finite() {
            return Err(Error::BlowUp { t: f.t().as_f64() });
        }
        let d = dissipation_rate(&f, k)?;
        cumulative += solver.dt * (d + d_prev) / T::lit(2.0);
        d_prev = d;
        if let Some(h) = fields.as_mut() {
            h.push(f.t(), alignment_field_grid_with(&f, k, solver.field_method)?)?;
        }
        if opts.records_step(n, steps) {
            record(&f, cumulative, &mut series)?;
        }
    }
    Ok(GridRun {
        series,
        state: f,
        fields,
        boundary_warning,
    })
}

#[derive(Clone, Debug)]
pub struct ParticleRun<T> {
    pub series: DiagnosticsSeries<T>,
    pub state: ParticleEnsemble<T>,
    /// Velocity diameter at every step including the initial one, when tracked.
    pub diameters: Vec<T>,
}

/// Particle run: RK4 for `σ = 0`, Euler–Maruyama with noise keyed on `seed` otherwise.
///
/// Dissipation is taken from the first-stage forces, so it costs nothing extra.
pub fn run_particles<T: Real>(
    e0: ParticleEnsemble<T>,
    kernel: &KernelSpec<T>,
    sigma: T,
    dt: T,
    steps: usize,
    seed: u64,
    opts: &RunOptions,
) -> Result<ParticleRun<T>> {
    run_particles_observed(e0, kernel, sigma, dt, steps, seed, opts, |_| Ok(()))
}

/// Like [`run_particles`], calling `observe` on the ensemble at every recorded output.
#[allow(clippy::too_many_arguments)]
pub fn run_particles_observed<T: Real>(
    e0: ParticleEnsemble<T>,
    kernel: &KernelSpec<T>,
    sigma: T,
    dt: T,
    steps: usize,
    seed: u64,
    opts: &RunOptions,
    mut observe: impl FnMut(&ParticleEnsemble<T>) -> Result<()>,
) -> Result<ParticleRun<T>> {
    let noise = NoiseStream::new(seed);
    let mut series = DiagnosticsSeries::new();
    let mut diameters = Vec::new();
    let t0 = e0.t();
    let mut e = e0;
    let mut f = forces(&e, kernel);
    let mut d_prev = dissipation_from_forces(&e, &f);
    let mut cumulative = T::zero();
    let push = |series: &mut DiagnosticsSeries<T>, e: &ParticleEnsemble<T>, d: T, c: T| {
        let mut r = particle_record(e, d);
        r.cumulative_dissipation = c;
        series.push(r)
    };
    push(&mut series, &e, d_prev, cumulative)?;
    observe(&e)?;
    if opts.track_diameter {
        diameters.push(e.velocity_diameter());
    }
    for n in 1..=steps {
        e = if sigma > T::zero() {
            step_stochastic_with(&e, dt, sigma, &noise, n as u64 - 1, &f)?
        } else {
            step_deterministic_with(&e, kernel, dt, &f)?
        };
        e.set_t(t0 + T::from_count(n) * dt);
        f = forces(&e, kernel);
        let d = dissipation_from_forces(&e, &f);
        cumulative += dt * (d + d_prev) / T::lit(2.0);
        d_prev = d;
        if opts.track_diameter {
            diameters.push(e.velocity_diameter());
        }
        if opts.records_step(n, steps) {
            push(&mut series, &e, d, cumulative)?;
            observe(&e)?;
        }
    }
    Ok(ParticleRun {
        series,
        state: e,
        diameters,
    })
}
