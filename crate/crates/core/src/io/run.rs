//! Runs a [`RunConfig`]: solvers, invariant checks, studies and their outputs.

use std::path::{Path, PathBuf};

use log::info;
use serde::Serialize;

use crate::diagnostics::{
    energy_ledger_cumulative, support_bound_check, weighted_l1_growth_rates, DiagnosticsSeries,
};
use crate::error::{Error, Result};
use crate::experiments::{
    run_cross_validation, run_grid_observed, run_particles, run_sigma_sweep, run_stability,
    CrossReport, GridRun, ParticleRun, RunOptions, StabilityReport, StudyKind, SweepReport,
};
use crate::grid::{GridSolver, PhaseGrid};
use crate::io::config::RunConfig;
use crate::io::csv::{append_table, emit_csv, format_f64};
use crate::io::snapshot::{write_snapshot, Snapshot};
use crate::io::svg::{heatmap, write_svg, Chart, Line};
use crate::particle::{sample_from_grid, ParticleEnsemble};

/// Relative mass drift allowed by the conservation check.
pub const MASS_TOLERANCE: f64 = 1e-9;
/// Grid energy-ledger residual allowed, relative to `E(0)`.
pub const GRID_LEDGER_TOLERANCE: f64 = 0.05;
/// Particle (RK4) energy-ledger residual allowed, relative to `E(0)`.
pub const PARTICLE_LEDGER_TOLERANCE: f64 = 1e-6;
/// Slack on the weighted-L¹ growth constant `2M + 1`.
pub const GROWTH_SLACK: f64 = 0.05;

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Check {
    pub name: String,
    pub passed: bool,
    /// Measured quantity, compared against `limit`.
    pub value: f64,
    pub limit: f64,
    pub detail: String,
}

impl Check {
    fn at_most(name: &str, value: f64, limit: f64, detail: impl Into<String>) -> Self {
        Self {
            name: name.into(),
            passed: value <= limit,
            value,
            limit,
            detail: detail.into(),
        }
    }
}

#[derive(Clone, Debug)]
pub struct GridOutput {
    pub initial: PhaseGrid<f64>,
    pub run: GridRun<f64>,
    /// Smallest cell value seen at any output.
    pub min_value: f64,
}

#[derive(Clone, Debug, Default)]
pub struct RunOutputs {
    pub grid: Option<GridOutput>,
    pub particles: Option<ParticleRun<f64>>,
    pub stability: Vec<StabilityReport>,
    pub sweeps: Vec<SweepReport>,
    pub cross: Vec<CrossReport>,
}

#[derive(Clone, Debug, Serialize)]
pub struct Summary {
    pub scenario: String,
    pub solver: String,
    pub sigma: f64,
    pub t_final: f64,
    pub passed: bool,
    pub checks: Vec<Check>,
    pub stability: Vec<StabilityReport>,
    pub sweeps: Vec<SweepReport>,
    pub cross: Vec<CrossReport>,
    pub files: Vec<String>,
}

/// Initial ensemble for a configuration: grid sampling per coordinate, so a
/// `d`-dimensional ensemble carries the product of the one-dimensional profile.
pub fn initial_ensemble(cfg: &RunConfig, f0: &PhaseGrid<f64>) -> Result<ParticleEnsemble<f64>> {
    let p = cfg.scenario.resolved_params();
    let (n, d) = (p.n_particles, p.d);
    let draws = sample_from_grid(f0, n * d, p.seed)?;
    if d == 1 {
        return Ok(draws);
    }
    let pos = draws.positions().to_vec();
    let vel = draws.velocities().to_vec();
    ParticleEnsemble::new(d, pos, vel, p.mass, f0.t())
}

pub fn run_grid_solver(cfg: &RunConfig) -> Result<GridOutput> {
    let s = &cfg.scenario;
    let p = s.resolved_params();
    if p.d != 1 {
        return Err(Error::Config(format!("the grid solver is one-dimensional, got d = {}", p.d)));
    }
    let f0 = s.initial_grid()?;
    let mut solver = GridSolver::new(s.kernel, p.sigma, p.dt);
    solver.field_method = cfg.field_method;
    solver.diffusion = cfg.diffusion;
    solver.reconstruction = cfg.reconstruction;
    let mut min_value = f64::INFINITY;
    let run = run_grid_observed(
        f0.clone(),
        &solver,
        &s.weights,
        p.steps(),
        &RunOptions::every(cfg.cadence),
        |g| {
            min_value = min_value.min(g.min_value());
            Ok(())
        },
    )?;
    Ok(GridOutput {
        initial: f0,
        run,
        min_value,
    })
}

pub fn run_particle_solver(cfg: &RunConfig) -> Result<ParticleRun<f64>> {
    let s = &cfg.scenario;
    let p = s.resolved_params();
    let f0 = s.initial_grid()?;
    let e0 = initial_ensemble(cfg, &f0)?;
    let opts = RunOptions {
        cadence: cfg.cadence,
        record_fields: false,
        track_diameter: p.sigma == 0.0,
    };
    run_particles(e0, &s.kernel, p.sigma, p.dt, p.steps(), p.seed, &opts)
}

fn max_ledger(series: &DiagnosticsSeries<f64>, sigma: f64, d: usize, mass: f64) -> (f64, f64) {
    let e0 = series.first().map(|r| r.energy).unwrap_or(0.0);
    let worst = energy_ledger_cumulative(series, sigma, d, mass)
        .iter()
        .map(|&(_, r)| r.abs())
        .fold(0.0, f64::max);
    (worst, e0)
}

fn growth_check(series: &DiagnosticsSeries<f64>, mass: f64, label: &str) -> Check {
    let bound = 2.0 * mass + 1.0;
    let worst = weighted_l1_growth_rates(series)
        .iter()
        .map(|&(_, g)| g)
        .fold(f64::NEG_INFINITY, f64::max);
    Check::at_most(
        &format!("{label}: weighted L1 growth rate"),
        worst,
        bound * (1.0 + GROWTH_SLACK),
        format!("d/dt log ‖(1+v²)^(1/2) f‖ against 2M + 1 = {bound}"),
    )
}

fn mass_check(series: &DiagnosticsSeries<f64>, label: &str) -> Check {
    let m0 = series.first().map(|r| r.mass).unwrap_or(0.0);
    let drift = series
        .records()
        .iter()
        .map(|r| ((r.mass - m0) / m0).abs())
        .fold(0.0, f64::max);
    Check::at_most(&format!("{label}: mass conservation"), drift, MASS_TOLERANCE, "max relative drift")
}

/// Invariant checks on completed runs.
pub fn invariant_checks(cfg: &RunConfig, out: &RunOutputs) -> Vec<Check> {
    let p = cfg.scenario.resolved_params();
    let r0 = cfg.scenario.profile.velocity_radius();
    let mut checks = Vec::new();
    if let Some(g) = &out.grid {
        let series = &g.run.series;
        checks.push(mass_check(series, "grid"));
        checks.push(Check::at_most(
            "grid: positivity",
            -g.min_value,
            0.0,
            "negated smallest cell value at any output",
        ));
        let (worst, e0) = max_ledger(series, p.sigma, 1, p.mass);
        checks.push(Check::at_most(
            "grid: energy ledger",
            worst / e0,
            GRID_LEDGER_TOLERANCE,
            "max |E(t) + ∫D − E(0) − 2σMt| / E(0)",
        ));
        if p.sigma == 0.0 {
            let excess = series
                .records()
                .iter()
                .map(|r| r.energy - e0)
                .fold(f64::NEG_INFINITY, f64::max);
            checks.push(Check::at_most(
                "grid: energy inequality",
                excess / e0,
                1e-12,
                "max (E(t) − E(0)) / E(0)",
            ));
            let sc = support_bound_check(series, r0, p.mass, 2.0 * g.initial.dv());
            checks.push(Check {
                name: "grid: support bound".into(),
                passed: sc.passed,
                value: -sc.worst_margin,
                limit: 0.0,
                detail: "R(t) ≤ R0 + M R0 t + 2Δv".into(),
            });
        }
        checks.push(growth_check(series, p.mass, "grid"));
    }
    if let Some(run) = &out.particles {
        let series = &run.series;
        checks.push(mass_check(series, "particles"));
        if p.sigma == 0.0 {
            let (worst, e0) = max_ledger(series, 0.0, p.d, p.mass);
            let rel = if e0 > 0.0 { worst / e0 } else { worst };
            checks.push(Check::at_most(
                "particles: energy ledger",
                rel,
                PARTICLE_LEDGER_TOLERANCE,
                "max |E(t) + ∫D − E(0)| / E(0)",
            ));
            let rise = run
                .diameters
                .windows(2)
                .map(|w| w[1] - w[0])
                .fold(f64::NEG_INFINITY, f64::max);
            checks.push(Check::at_most(
                "particles: velocity diameter monotone",
                rise.max(0.0),
                1e-12,
                "largest one-step increase of max |V_i − V_j|",
            ));
            let sc = support_bound_check(series, run_radius(series), p.mass, 0.0);
            checks.push(Check {
                name: "particles: support bound".into(),
                passed: sc.passed,
                value: -sc.worst_margin,
                limit: 0.0,
                detail: "R(t) ≤ R0 + M R0 t".into(),
            });
        }
        checks.push(growth_check(series, p.mass, "particles"));
    }
    for sw in &out.sweeps {
        checks.push(Check {
            name: format!("sweep {}: monotone error", sw.scenario),
            passed: sw.monotone(),
            value: sw.ratios().iter().copied().fold(0.0, f64::max),
            limit: 1.0 + crate::experiments::MONOTONE_TOLERANCE,
            detail: "largest err(σ_{i+1}) / err(σ_i)".into(),
        });
    }
    checks
}

fn run_radius(series: &DiagnosticsSeries<f64>) -> f64 {
    series.first().map(|r| r.support_radius).unwrap_or(0.0)
}

/// Runs the configured solvers, plus every stability study.
pub fn simulate(cfg: &RunConfig) -> Result<RunOutputs> {
    let mut out = RunOutputs::default();
    if cfg.solver.runs_grid() {
        info!("grid run: {}", cfg.scenario.name);
        out.grid = Some(run_grid_solver(cfg)?);
    }
    if cfg.solver.runs_particles() {
        info!("particle run: {}", cfg.scenario.name);
        out.particles = Some(run_particle_solver(cfg)?);
    }
    run_studies(cfg, &mut out, |k| matches!(k, StudyKind::Stability { .. }))?;
    Ok(out)
}

pub fn run_studies(
    cfg: &RunConfig,
    out: &mut RunOutputs,
    select: impl Fn(&StudyKind<f64>) -> bool,
) -> Result<()> {
    for spec in cfg.studies.iter().filter(|s| select(&s.kind)) {
        let base = cfg.study_scenario(spec)?;
        info!("{} study on {}", spec.kind.label(), base.name);
        match spec.kind {
            StudyKind::Stability { .. } => out.stability.push(run_stability(&base, spec)?),
            StudyKind::SigmaSweep { .. } => out.sweeps.push(run_sigma_sweep(&base, spec)?),
            StudyKind::CrossValidate { .. } => out.cross.push(run_cross_validation(&base, spec)?),
        }
    }
    Ok(())
}

fn ensure_dir(dir: &Path) -> Result<()> {
    std::fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))
}

/// Plots for solver runs: ledger, support radius, norm growth, heatmaps.
pub fn emit_run_plots(cfg: &RunConfig, out: &RunOutputs, prefix: &Path) -> Result<Vec<PathBuf>> {
    let p = cfg.scenario.resolved_params();
    let mut files = Vec::new();
    let mut put = |name: String, svg: String| -> Result<()> {
        let path = with_suffix(prefix, &name);
        write_svg(&path, &svg)?;
        files.push(path);
        Ok(())
    };
    let mut series: Vec<(&str, &DiagnosticsSeries<f64>, usize)> = Vec::new();
    if let Some(g) = &out.grid {
        series.push(("grid", &g.run.series, 1));
    }
    if let Some(r) = &out.particles {
        series.push(("particles", &r.series, p.d));
    }
    for (label, s, d) in series {
        put(format!("{label}_ledger.svg"), ledger_chart(s, p.sigma, d, p.mass, label).render())?;
        put(format!("{label}_support.svg"), support_chart(s, p.sigma, p.mass, label).render())?;
        put(format!("{label}_norms.svg"), norms_chart(s, label).render())?;
    }
    if let Some(g) = &out.grid {
        put("grid_initial.svg".into(), heatmap(&g.initial, "f(0, x, v)"))?;
        put("grid_final.svg".into(), heatmap(&g.run.state, "f(T, x, v)"))?;
    }
    Ok(files)
}

/// Plots for completed studies; nothing is written when there are none.
pub fn emit_study_plots(out: &RunOutputs, prefix: &Path) -> Result<Vec<PathBuf>> {
    let mut files = Vec::new();
    for (i, st) in out.stability.iter().enumerate() {
        let path = with_suffix(prefix, &format!("stability_{i}.svg"));
        write_svg(&path, &stability_chart(st).render())?;
        files.push(path);
    }
    for (i, sw) in out.sweeps.iter().enumerate() {
        let path = with_suffix(prefix, &format!("sweep_{i}.svg"));
        write_svg(&path, &sweep_chart(sw).render())?;
        files.push(path);
    }
    Ok(files)
}

fn with_suffix(prefix: &Path, name: &str) -> PathBuf {
    if prefix.as_os_str().is_empty() || prefix.is_dir() {
        prefix.join(name)
    } else {
        let stem = prefix.file_name().map(|s| s.to_string_lossy().into_owned()).unwrap_or_default();
        prefix.with_file_name(format!("{stem}_{name}"))
    }
}

pub fn ledger_chart(s: &DiagnosticsSeries<f64>, sigma: f64, d: usize, mass: f64, label: &str) -> Chart {
    let mut c = Chart::new(&format!("{label}: energy ledger"), "t", "energy");
    let t0 = s.first().map(|r| r.t).unwrap_or(0.0);
    let e0 = s.first().map(|r| r.energy).unwrap_or(0.0);
    let c0 = s.first().map(|r| r.cumulative_dissipation).unwrap_or(0.0);
    let src = 2.0 * d as f64 * sigma * mass;
    c.lines.push(Line::new("E(t)", s.records().iter().map(|r| (r.t, r.energy)).collect()));
    c.lines.push(
        Line::new(
            "E(0) − ∫D + 2dσMt",
            s.records()
                .iter()
                .map(|r| (r.t, e0 - (r.cumulative_dissipation - c0) + src * (r.t - t0)))
                .collect(),
        )
        .dashed(),
    );
    c.lines.push(Line::new(
        "∫D",
        s.records().iter().map(|r| (r.t, r.cumulative_dissipation - c0)).collect(),
    ));
    c
}

pub fn support_chart(s: &DiagnosticsSeries<f64>, sigma: f64, mass: f64, label: &str) -> Chart {
    let mut c = Chart::new(&format!("{label}: velocity support radius"), "t", "R(t)");
    c.lines.push(Line::new("R(t)", s.records().iter().map(|r| (r.t, r.support_radius)).collect()));
    if sigma == 0.0 {
        let (t0, r0) = s.first().map(|r| (r.t, r.support_radius)).unwrap_or((0.0, 0.0));
        c.lines.push(
            Line::new(
                "R0 + M R0 t",
                s.records().iter().map(|r| (r.t, r0 + mass * r0 * (r.t - t0))).collect(),
            )
            .dashed(),
        );
    }
    c
}

pub fn norms_chart(s: &DiagnosticsSeries<f64>, label: &str) -> Chart {
    let mut c = Chart::new(&format!("{label}: weighted norms"), "t", "norm");
    c.log_y = true;
    let col = |name: &str, get: &dyn Fn(&crate::diagnostics::Record<f64>) -> Option<f64>| {
        let pts: Vec<(f64, f64)> = s.records().iter().filter_map(|r| get(r).map(|v| (r.t, v))).collect();
        (!pts.is_empty()).then(|| Line::new(name, pts))
    };
    let lines = [
        col("‖(1+v²)^½ f‖_L1", &|r| Some(r.l1_v)),
        col("‖f‖_L2(ω)", &|r| r.l2w),
        col("‖f‖_X", &|r| r.x_norm),
        col("‖f‖_W11", &|r| r.w11),
    ];
    c.lines.extend(lines.into_iter().flatten());
    c
}

pub fn stability_chart(st: &StabilityReport) -> Chart {
    let mut c = Chart::new(
        &format!("{}: amplification in {}", st.scenario, st.norm),
        "t",
        "A(t)",
    );
    c.lines.push(Line::new(
        &format!("δ = {}", st.delta),
        st.times.iter().copied().zip(st.amplification.iter().copied()).collect(),
    ));
    c.lines.push(
        Line::new(
            &format!("δ = {}", st.delta / 2.0),
            st.times.iter().copied().zip(st.amplification_half.iter().copied()).collect(),
        )
        .dashed(),
    );
    c
}

pub fn sweep_chart(sw: &SweepReport) -> Chart {
    let mut c = Chart::new(&format!("{}: vanishing-noise error", sw.scenario), "σ", "error");
    c.log_x = true;
    c.log_y = true;
    let pts = |e: &[f64]| sw.sigmas.iter().copied().zip(e.iter().copied()).collect::<Vec<_>>();
    c.lines.push(Line::new(&format!("‖f^σ − f^0‖_{}", sw.norm), pts(&sw.err)));
    c.lines.push(Line::new("macroscopic L1", pts(&sw.err_macro)));
    if let Some(fit) = sw.fit {
        c.lines.push(
            Line::new(
                "fit",
                sw.sigmas.iter().map(|&s| (s, fit.eval(s.ln()).exp())).collect(),
            )
            .dashed(),
        );
        c.annotation = Some(format!("fitted slope p = {:.3} (rms {:.2e})", fit.slope, fit.rms));
    }
    c
}

/// Writes CSVs, snapshots and plots for a run; returns every file written.
pub fn write_run_outputs(cfg: &RunConfig, out: &RunOutputs, dir: &Path) -> Result<Vec<PathBuf>> {
    ensure_dir(dir)?;
    let mut files = Vec::new();
    let sigma = cfg.scenario.params.sigma;
    if let Some(g) = &out.grid {
        let csv = dir.join("grid.csv");
        emit_csv(&g.run.series, &csv)?;
        files.push(csv);
        for (name, state) in [("grid_initial.kcs", &g.initial), ("grid_final.kcs", &g.run.state)] {
            let path = dir.join(name);
            write_snapshot(&Snapshot::grid(state.clone(), sigma), &path)?;
            files.push(path);
        }
    }
    if let Some(r) = &out.particles {
        let csv = dir.join("particles.csv");
        emit_csv(&r.series, &csv)?;
        files.push(csv);
        let path = dir.join("particles_final.kcs");
        write_snapshot(&Snapshot::particles(r.state.clone(), sigma), &path)?;
        files.push(path);
    }
    files.extend(write_study_tables(out, dir)?);
    files.extend(emit_run_plots(cfg, out, dir)?);
    files.extend(emit_study_plots(out, dir)?);
    Ok(files)
}

pub fn write_study_tables(out: &RunOutputs, dir: &Path) -> Result<Vec<PathBuf>> {
    ensure_dir(dir)?;
    let mut files = Vec::new();
    for (i, st) in out.stability.iter().enumerate() {
        let path = dir.join(format!("stability_{i}.csv"));
        let rows = (0..st.times.len()).map(|k| {
            [
                st.times[k],
                st.distance[k],
                st.distance_half[k],
                st.amplification[k],
                st.amplification_half[k],
            ]
            .map(format_f64)
            .join(",")
        });
        append_table(&path, "t,distance,distance_half,amplification,amplification_half", rows)?;
        files.push(path);
    }
    for (i, sw) in out.sweeps.iter().enumerate() {
        let path = dir.join(format!("sweep_{i}.csv"));
        let rows = (0..sw.sigmas.len()).map(|k| {
            [sw.sigmas[k], sw.err[k], sw.err_l2w[k], sw.err_l1[k], sw.err_macro[k]]
                .map(format_f64)
                .join(",")
        });
        append_table(&path, "sigma,err,err_l2w,err_l1,err_macro", rows)?;
        files.push(path);
    }
    for (i, cr) in out.cross.iter().enumerate() {
        let path = dir.join(format!("cross_{i}.csv"));
        let rows = cr.rows.iter().map(|r| {
            format!(
                "{},{},{},{},{},{}",
                r.n,
                r.resolution,
                format_f64(r.mass),
                format_f64(r.momentum),
                format_f64(r.energy),
                format_f64(r.histogram)
            )
        });
        append_table(&path, "n,resolution,mass,momentum,energy,histogram", rows)?;
        files.push(path);
    }
    Ok(files)
}

pub fn summary(cfg: &RunConfig, out: &RunOutputs, checks: Vec<Check>, files: &[PathBuf]) -> Summary {
    let p = cfg.scenario.resolved_params();
    Summary {
        scenario: cfg.scenario.name.clone(),
        solver: format!("{:?}", cfg.solver).to_lowercase(),
        sigma: p.sigma,
        t_final: p.t_final,
        passed: checks.iter().all(|c| c.passed),
        checks,
        stability: out.stability.clone(),
        sweeps: out.sweeps.clone(),
        cross: out.cross.clone(),
        files: files.iter().map(|f| f.display().to_string()).collect(),
    }
}

pub fn write_summary(s: &Summary, path: &Path) -> Result<()> {
    let text = serde_json::to_string_pretty(s).map_err(|e| Error::InvalidState(e.to_string()))?;
    std::fs::write(path, text + "\n").map_err(|e| Error::io(path, e))
}
