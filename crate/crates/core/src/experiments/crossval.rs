use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::experiments::runner::{run_grid_observed, run_particles_observed, RunOptions};
use crate::experiments::study::{StudyKind, StudySpec};
use crate::experiments::Scenario;
use crate::grid::{GridSolver, PhaseGrid};
use crate::particle::{empirical_moments, sample_from_grid, ParticleEnsemble};
use crate::scalar::Real;

/// Worst relative discrepancies over all output times for one `(N, resolution)` pair.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct CrossRow {
    pub n: usize,
    pub resolution: usize,
    /// `|M_p − M_g| / M_g`.
    pub mass: f64,
    /// `|P_p − P_g| / sqrt(M E_g(0))`.
    pub momentum: f64,
    /// `|E_p − E_g| / E_g(0)`.
    pub energy: f64,
    /// `‖h_p − ρ_g‖_{L¹(v)} / M` with particle velocities binned on the grid's cells.
    pub histogram: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CrossReport {
    pub scenario: String,
    pub sigma: f64,
    pub t_final: f64,
    pub rows: Vec<CrossRow>,
}

impl CrossReport {
    /// Largest moment discrepancy (mass, momentum, energy) of each row.
    pub fn moment_discrepancies(&self) -> Vec<f64> {
        self.rows
            .iter()
            .map(|r| r.mass.max(r.momentum).max(r.energy))
            .collect()
    }
}

struct Snapshot<T> {
    mass: T,
    momentum: T,
    energy: T,
    marginal: Vec<T>,
}

pub fn run_cross_validation<T: Real>(scenario: &Scenario<T>, spec: &StudySpec<T>) -> Result<CrossReport> {
    spec.validate()?;
    let StudyKind::CrossValidate { n_list, resolutions } = &spec.kind else {
        return Err(Error::Config(format!(
            "run_cross_validation needs a cross-validation study, got {}",
            spec.kind.label()
        )));
    };
    let mut base = scenario.clone();
    if let Some(t) = spec.t_final {
        base.params.t_final = t;
    }
    let opts = RunOptions::every(spec.cadence);
    let rows = n_list
        .par_iter()
        .zip(resolutions.par_iter())
        .map(|(&n, &res)| compare_pair(&base.clone().with_resolution(res, res), n, &opts))
        .collect::<Result<Vec<_>>>()?;
    Ok(CrossReport {
        scenario: base.name.clone(),
        sigma: base.params.sigma.as_f64(),
        t_final: base.params.t_final.as_f64(),
        rows,
    })
}

fn compare_pair<T: Real>(s: &Scenario<T>, n: usize, opts: &RunOptions) -> Result<CrossRow> {
    s.validate()?;
    let p = s.resolved_params();
    let f0 = s.initial_grid()?;
    let e0 = sample_from_grid(&f0, n, p.seed)?;
    let steps = p.steps();

    let solver = GridSolver::new(s.kernel, p.sigma, p.dt);
    let mut grid_snaps = Vec::new();
    run_grid_observed(f0.clone(), &solver, &s.weights, steps, opts, |g| {
        grid_snaps.push(grid_snapshot(g));
        Ok(())
    })?;

    let mut part_snaps = Vec::new();
    run_particles_observed(e0, &s.kernel, p.sigma, p.dt, steps, p.seed, opts, |e| {
        part_snaps.push(particle_snapshot(e, &f0));
        Ok(())
    })?;

    let m = grid_snaps[0].mass;
    let e_scale = if grid_snaps[0].energy > T::zero() {
        grid_snaps[0].energy
    } else {
        T::one()
    };
    let p_scale = (m * e_scale).sqrt();
    let dv = f0.dv();
    let mut row = CrossRow {
        n,
        resolution: s.params.nx,
        mass: 0.0,
        momentum: 0.0,
        energy: 0.0,
        histogram: 0.0,
    };
    for (g, q) in grid_snaps.iter().zip(&part_snaps) {
        row.mass = row.mass.max(((q.mass - g.mass).abs() / g.mass).as_f64());
        row.momentum = row.momentum.max(((q.momentum - g.momentum).abs() / p_scale).as_f64());
        row.energy = row.energy.max(((q.energy - g.energy).abs() / e_scale).as_f64());
        let h: T = q
            .marginal
            .iter()
            .zip(&g.marginal)
            .map(|(&a, &b)| (a - b).abs())
            .sum::<T>()
            * dv
            / m;
        row.histogram = row.histogram.max(h.as_f64());
    }
    Ok(row)
}

fn grid_snapshot<T: Real>(f: &PhaseGrid<T>) -> Snapshot<T> {
    let dv = f.dv();
    let vs = f.v_axis().centers();
    let marginal = f.v_marginal();
    let momentum = marginal.iter().zip(&vs).map(|(&r, &v)| r * v).sum::<T>() * dv;
    let energy = marginal.iter().zip(&vs).map(|(&r, &v)| r * v * v).sum::<T>() * dv;
    Snapshot {
        mass: f.mass(),
        momentum,
        energy,
        marginal,
    }
}

/// Moments of a one-dimensional ensemble plus its velocity histogram on `grid`'s cells.
/// Particles outside the grid's velocity range are left out of the histogram.
fn particle_snapshot<T: Real>(e: &ParticleEnsemble<T>, grid: &PhaseGrid<T>) -> Snapshot<T> {
    let m = empirical_moments(e);
    let mut marginal = vec![T::zero(); grid.nv()];
    let w = e.weight() / grid.dv();
    for &v in e.velocities().iter().step_by(e.d()) {
        if let Some(k) = grid.v_axis().cell_of(v) {
            marginal[k] += w;
        }
    }
    Snapshot {
        mass: m.mass,
        momentum: m.momentum[0],
        energy: m.energy,
        marginal,
    }
}
