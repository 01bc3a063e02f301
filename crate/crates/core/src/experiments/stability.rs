use rayon::prelude::*;
use serde::Serialize;

use crate::diagnostics::pairwise_distance;
use crate::error::{Error, Result};
use crate::experiments::fit::{fit_line, LineFit};
use crate::experiments::runner::{run_grid_observed, RunOptions};
use crate::experiments::study::{NormKind, StudyKind, StudySpec};
use crate::experiments::Scenario;
use crate::grid::{auto_lx, cos_bump, lv_for_radius, GridSolver, PhaseGrid, Profile};
use crate::scalar::Real;

/// Amplification table of a stability study.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct StabilityReport {
    pub scenario: String,
    pub norm: NormKind,
    pub delta: f64,
    pub times: Vec<f64>,
    pub distance: Vec<f64>,
    pub distance_half: Vec<f64>,
    /// `A(t) = dist(f, g)(t) / dist(f, g)(0)` for the full perturbation.
    pub amplification: Vec<f64>,
    pub amplification_half: Vec<f64>,
}

impl StabilityReport {
    pub fn max_amplification(&self) -> f64 {
        self.amplification.iter().copied().fold(0.0, f64::max)
    }

    pub fn final_amplification(&self) -> f64 {
        self.amplification.last().copied().unwrap_or(0.0)
    }

    /// `max_t |A_δ − A_{δ/2}| / A_δ`: zero in the linear-response regime.
    pub fn linear_response_defect(&self) -> f64 {
        self.amplification
            .iter()
            .zip(&self.amplification_half)
            .filter(|(a, _)| **a > 0.0)
            .map(|(a, b)| (a - b).abs() / a)
            .fold(0.0, f64::max)
    }

    /// Least-squares line through `(t, log A(t))`, lifted so that it bounds
    /// every sample from above. `None` when some `A` vanishes.
    pub fn log_growth_envelope(&self) -> Option<LineFit> {
        if self.amplification.iter().any(|&a| !(a > 0.0)) {
            return None;
        }
        let logs: Vec<f64> = self.amplification.iter().map(|a| a.ln()).collect();
        let mut fit = fit_line(&self.times, &logs)?;
        let lift = self
            .times
            .iter()
            .zip(&logs)
            .map(|(&t, &l)| l - fit.eval(t))
            .fold(0.0, f64::max);
        fit.intercept += lift;
        Some(fit)
    }
}

/// Default perturbation for a profile: a cosine bump over part of its bulk,
/// normalised to unit `L¹` mass on the grid.
pub fn perturbation_bump<T: Real>(profile: &Profile<T>, like: &PhaseGrid<T>) -> PhaseGrid<T> {
    let (center, radii) = bump_placement(profile);
    let mut g = like.with_values(vec![T::zero(); like.values().len()]);
    let xs = g.x_axis().centers();
    let vs = g.v_axis().centers();
    for (j, &x) in xs.iter().enumerate() {
        let bx = cos_bump((x - center.0) / radii.0);
        if bx == T::zero() {
            continue;
        }
        for (k, &v) in vs.iter().enumerate() {
            g.set(j, k, bx * cos_bump((v - center.1) / radii.1));
        }
    }
    let m = g.mass();
    if m > T::zero() {
        g.scale(T::one() / m);
    }
    g
}

fn bump_placement<T: Real>(profile: &Profile<T>) -> ((T, T), (T, T)) {
    let half = T::lit(0.5);
    match *profile {
        Profile::Maxwellian {
            x_center,
            v_center,
            x_spread,
            v_spread,
        } => (
            (x_center, v_center),
            (T::lit(2.0) * x_spread, T::lit(2.0) * v_spread),
        ),
        Profile::BumpCompact { r0, x_width } => ((T::zero(), T::zero()), (half * x_width, half * r0)),
        Profile::TwoBeam {
            v0,
            beam_width,
            x_width,
        } => ((T::zero(), v0), (half * x_width, beam_width)),
        Profile::RigidFlock { u, x_width } => ((T::zero(), u), (half * x_width, half)),
    }
}

fn bump_velocity_radius<T: Real>(profile: &Profile<T>) -> T {
    let (c, r) = bump_placement(profile);
    c.1.abs() + r.1
}

/// Scenario with the study's horizon applied and `Lv` large enough for the
/// perturbed data.
fn stability_scenario<T: Real>(scenario: &Scenario<T>, spec: &StudySpec<T>) -> Scenario<T> {
    let mut s = scenario.clone();
    if let Some(t) = spec.t_final {
        s.params.t_final = t;
    }
    if s.auto_lv {
        let p = &s.params;
        let delta = match spec.kind {
            StudyKind::Stability { delta, .. } => delta,
            _ => T::zero(),
        };
        let r0 = s.profile.velocity_radius().max(bump_velocity_radius(&s.profile));
        s.params.lv = lv_for_radius(r0, p.sigma, p.t_final, p.mass + delta.abs(), p.nv);
        s.auto_lv = false;
    }
    if s.auto_lx {
        let p = &s.params;
        let extra = (bump_velocity_radius(&s.profile) - s.profile.velocity_radius()).max(T::zero());
        let margin = T::one() - T::lit(4.0) / T::from_count(p.nx);
        s.params.lx = auto_lx(&s.profile, p.sigma, p.t_final, p.nx) + extra * p.t_final / margin;
        s.auto_lx = false;
    }
    s
}

pub fn run_stability<T: Real>(scenario: &Scenario<T>, spec: &StudySpec<T>) -> Result<StabilityReport> {
    let s = stability_scenario(scenario, spec);
    let f0 = s.initial_grid()?;
    let bump = perturbation_bump(&s.profile, &f0);
    run_stability_with_bump(&s, spec, &bump)
}

/// Stability study with an explicit perturbation shape (used as given, not renormalised).
pub fn run_stability_with_bump<T: Real>(
    scenario: &Scenario<T>,
    spec: &StudySpec<T>,
    bump: &PhaseGrid<T>,
) -> Result<StabilityReport> {
    spec.validate()?;
    let StudyKind::Stability { delta, norm } = spec.kind else {
        return Err(Error::Config(format!(
            "run_stability needs a stability study, got {}",
            spec.kind.label()
        )));
    };
    let s = stability_scenario(scenario, spec);
    s.validate()?;
    let f0 = s.initial_grid()?;
    if !f0.same_geometry(bump) {
        return Err(Error::Geometry("perturbation grid differs from the base grid".into()));
    }
    let perturbed = |scale: T| -> Result<PhaseGrid<T>> {
        let vals: Vec<T> = f0
            .values()
            .iter()
            .zip(bump.values())
            .map(|(&a, &b)| a + scale * b)
            .collect();
        let g = f0.with_values(vals);
        if g.min_value() < T::zero() {
            return Err(Error::Config(format!(
                "perturbation δ = {scale} makes the initial density negative"
            )));
        }
        Ok(g)
    };
    let initials = vec![f0.clone(), perturbed(delta)?, perturbed(delta / T::lit(2.0))?];

    let p = &s.params;
    let solver = GridSolver::new(s.kernel, p.sigma, p.dt);
    let opts = RunOptions::every(spec.cadence);
    let steps = p.steps();
    let runs: Vec<Vec<PhaseGrid<T>>> = initials
        .into_par_iter()
        .map(|g0| {
            let mut states = Vec::new();
            run_grid_observed(g0, &solver, &s.weights, steps, &opts, |g| {
                states.push(g.clone());
                Ok(())
            })?;
            Ok(states)
        })
        .collect::<Result<_>>()?;

    let dist = |other: &[PhaseGrid<T>]| -> Result<Vec<f64>> {
        runs[0]
            .iter()
            .zip(other)
            .map(|(a, b)| Ok(norm.pick(&pairwise_distance(a, b, &s.weights)?).as_f64()))
            .collect()
    };
    let distance = dist(&runs[1])?;
    let distance_half = dist(&runs[2])?;
    Ok(StabilityReport {
        scenario: s.name.clone(),
        norm,
        delta: delta.as_f64(),
        times: runs[0].iter().map(|g| g.t().as_f64()).collect(),
        amplification: amplification(&distance),
        amplification_half: amplification(&distance_half),
        distance,
        distance_half,
    })
}

fn amplification(d: &[f64]) -> Vec<f64> {
    let d0 = d.first().copied().unwrap_or(0.0);
    d.iter()
        .map(|&x| {
            if d0 > 0.0 {
                x / d0
            } else if x == 0.0 {
                0.0
            } else {
                f64::INFINITY
            }
        })
        .collect()
}
