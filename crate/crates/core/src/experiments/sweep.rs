use rayon::prelude::*;
use serde::Serialize;

use crate::diagnostics::pairwise_distance;
use crate::error::{Error, Result};
use crate::experiments::fit::{fit_power_law, LineFit};
use crate::experiments::runner::{run_grid_observed, RunOptions};
use crate::experiments::study::{NormKind, StudyKind, StudySpec};
use crate::experiments::Scenario;
use crate::grid::{auto_lv, auto_lx, cos_bump, GridSolver, PhaseGrid};
use crate::scalar::Real;

/// Relative slack allowed when checking that errors do not increase as σ decreases.
pub const MONOTONE_TOLERANCE: f64 = 0.05;

/// Convergence table of a vanishing-noise sweep against the `σ = 0` run.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SweepReport {
    pub scenario: String,
    pub norm: NormKind,
    pub t_final: f64,
    pub sigmas: Vec<f64>,
    /// `‖f^σ(T) − f^0(T)‖` in the study's norm.
    pub err: Vec<f64>,
    pub err_l2w: Vec<f64>,
    pub err_l1: Vec<f64>,
    /// `∫₀ᵀ ∫ |∫ (f^σ − f^0) φ_test dv| dx dt`.
    pub err_macro: Vec<f64>,
    /// `err ≈ C σ^p`: slope is `p`.
    pub fit: Option<LineFit>,
    pub fit_macro: Option<LineFit>,
}

/// `err[i+1] / err[i]` for consecutive sweep entries.
pub fn adjacent_ratios(err: &[f64]) -> Vec<f64> {
    err.windows(2).map(|w| w[1] / w[0]).collect()
}

/// Whether `err` does not grow along the (decreasing) σ list, up to `tol` relative slack.
pub fn is_monotone(err: &[f64], tol: f64) -> bool {
    err.windows(2).all(|w| w[1] <= w[0] * (1.0 + tol))
}

impl SweepReport {
    pub fn ratios(&self) -> Vec<f64> {
        adjacent_ratios(&self.err)
    }

    pub fn monotone(&self) -> bool {
        is_monotone(&self.err, MONOTONE_TOLERANCE)
    }

    pub fn macro_monotone(&self) -> bool {
        is_monotone(&self.err_macro, MONOTONE_TOLERANCE)
    }

    /// Smallest-σ error against three times the fitted model's prediction.
    pub fn extrapolation_consistent(&self) -> bool {
        match (self.fit, self.sigmas.last(), self.err.last()) {
            (Some(fit), Some(&s), Some(&e)) => e <= 3.0 * fit.eval(s.ln()).exp(),
            _ => false,
        }
    }
}

struct SweepRun<T> {
    state: PhaseGrid<T>,
    times: Vec<T>,
    /// Macroscopic density `∫ f φ_test dv` per x-cell at each output.
    macros: Vec<Vec<T>>,
}

/// Runs the base scenario at `σ = 0` and at each σ of the study on one common grid.
pub fn run_sigma_sweep<T: Real>(scenario: &Scenario<T>, spec: &StudySpec<T>) -> Result<SweepReport> {
    spec.validate()?;
    let StudyKind::SigmaSweep { sigmas, norm } = &spec.kind else {
        return Err(Error::Config(format!(
            "run_sigma_sweep needs a sigma sweep, got {}",
            spec.kind.label()
        )));
    };
    let norm = *norm;
    let mut base = scenario.clone().with_sigma(T::zero());
    if let Some(t) = spec.t_final {
        base.params.t_final = t;
    }
    if base.auto_lv {
        let p = &base.params;
        base.params.lv = std::iter::once(T::zero())
            .chain(sigmas.iter().copied())
            .map(|s| auto_lv(&base.profile, s, p.t_final, p.mass, p.nv))
            .fold(T::zero(), T::max);
        base.auto_lv = false;
    }
    if base.auto_lx {
        let p = &base.params;
        base.params.lx = sigmas
            .iter()
            .map(|&s| auto_lx(&base.profile, s, p.t_final, p.nx))
            .fold(auto_lx(&base.profile, T::zero(), p.t_final, p.nx), T::max);
        base.auto_lx = false;
    }
    base.validate()?;
    let f0 = base.initial_grid()?;
    let r_test = base.profile.velocity_radius().max(f0.dv() * T::lit(4.0));
    let test_fn: Vec<T> = f0
        .v_axis()
        .centers()
        .iter()
        .map(|&v| cos_bump(v / r_test))
        .collect();

    let p = &base.params;
    let steps = p.steps();
    let opts = RunOptions::every(spec.cadence);
    let all: Vec<T> = std::iter::once(T::zero()).chain(sigmas.iter().copied()).collect();
    let runs: Vec<SweepRun<T>> = all
        .par_iter()
        .map(|&sigma| {
            let solver = GridSolver::new(base.kernel, sigma, p.dt);
            let mut times = Vec::new();
            let mut macros = Vec::new();
            let run = run_grid_observed(f0.clone(), &solver, &base.weights, steps, &opts, |g| {
                times.push(g.t());
                macros.push(macroscopic(g, &test_fn));
                Ok(())
            })?;
            Ok(SweepRun {
                state: run.state,
                times,
                macros,
            })
        })
        .collect::<Result<_>>()?;

    let reference = &runs[0];
    let dx = f0.dx();
    let mut err = Vec::new();
    let mut err_l2w = Vec::new();
    let mut err_l1 = Vec::new();
    let mut err_macro = Vec::new();
    for run in &runs[1..] {
        let d = pairwise_distance(&run.state, &reference.state, &base.weights)?;
        err.push(norm.pick(&d).as_f64());
        err_l2w.push(d.l2w.as_f64());
        err_l1.push(d.l1.as_f64());
        let per_time: Vec<T> = run
            .macros
            .iter()
            .zip(&reference.macros)
            .map(|(a, b)| a.iter().zip(b).map(|(&x, &y)| (x - y).abs()).sum::<T>() * dx)
            .collect();
        let mut acc = T::zero();
        for i in 1..per_time.len() {
            let h = reference.times[i] - reference.times[i - 1];
            acc += h * (per_time[i] + per_time[i - 1]) / T::lit(2.0);
        }
        err_macro.push(acc.as_f64());
    }
    let s64: Vec<f64> = sigmas.iter().map(|s| s.as_f64()).collect();
    Ok(SweepReport {
        scenario: base.name.clone(),
        norm,
        t_final: p.t_final.as_f64(),
        fit: fit_power_law(&s64, &err),
        fit_macro: fit_power_law(&s64, &err_macro),
        sigmas: s64,
        err,
        err_l2w,
        err_l1,
        err_macro,
    })
}

fn macroscopic<T: Real>(f: &PhaseGrid<T>, test_fn: &[T]) -> Vec<T> {
    let dv = f.dv();
    (0..f.nx())
        .map(|j| {
            f.column(j)
                .iter()
                .zip(test_fn)
                .map(|(&a, &b)| a * b)
                .sum::<T>()
                * dv
        })
        .collect()
}
