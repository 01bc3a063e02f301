use std::ffi::OsString;
use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand};

use crate::error::{Error, Result};
use crate::experiments::StudyKind;
use crate::io::config::{load_config, RunConfig};
use crate::io::run::{
    invariant_checks, run_studies, simulate, summary, write_run_outputs, write_study_tables,
    write_summary, Check, RunOutputs,
};
use crate::io::snapshot::read_snapshot_header;

#[derive(Parser, Debug)]
#[command(name = "kcs", version, about = "Kinetic Cucker–Smale simulation and verification")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Run the configured solvers and stability studies, writing CSV, snapshots and plots.
    Simulate {
        config: PathBuf,
        /// Output directory (overrides `output` in [run]).
        #[arg(short, long)]
        out: Option<PathBuf>,
    },
    /// Run the configured solvers and check every invariant; exit 1 on any failure.
    Verify {
        config: PathBuf,
        #[arg(short, long)]
        out: Option<PathBuf>,
    },
    /// Run the configured sigma-sweep studies.
    Sweep {
        config: PathBuf,
        #[arg(short, long)]
        out: Option<PathBuf>,
    },
    /// Run the configured particle/grid cross-validation studies.
    Compare {
        config: PathBuf,
        #[arg(short, long)]
        out: Option<PathBuf>,
    },
    /// Print the header of a snapshot file.
    Inspect { snapshot: PathBuf },
}

/// Process exit status for an error: 3 for failures while running, 2 for bad input.
pub fn exit_code(e: &Error) -> i32 {
    match e {
        Error::BlowUp { .. }
        | Error::StepSize(_)
        | Error::InvalidState(_)
        | Error::Extrapolation { .. }
        | Error::Geometry(_) => 3,
        _ => 2,
    }
}

/// Entry point behind the `kcs` binary; returns the process exit status.
pub fn cli_main<I, S>(args: I) -> i32
where
    I: IntoIterator<Item = S>,
    S: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { 2 } else { 0 };
        }
    };
    match dispatch(cli.command) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            exit_code(&e)
        }
    }
}

fn load(config: &Path, out: Option<PathBuf>) -> Result<RunConfig> {
    let mut cfg = load_config(config)?;
    if let Some(o) = out {
        cfg.output_dir = o;
    }
    Ok(cfg)
}

fn report(checks: &[Check]) -> i32 {
    for c in checks {
        println!(
            "{} {}: {:.3e} (limit {:.3e}) {}",
            if c.passed { "PASS" } else { "FAIL" },
            c.name,
            c.value,
            c.limit,
            c.detail
        );
    }
    if checks.iter().all(|c| c.passed) {
        0
    } else {
        1
    }
}

fn finish(cfg: &RunConfig, out: &RunOutputs, checks: Vec<Check>, files: Vec<PathBuf>) -> Result<i32> {
    let code = report(&checks);
    let path = cfg.output_dir.join("summary.json");
    write_summary(&summary(cfg, out, checks, &files), &path)?;
    println!("wrote {} files to {}", files.len() + 1, cfg.output_dir.display());
    Ok(code)
}

fn dispatch(cmd: Command) -> Result<i32> {
    match cmd {
        Command::Simulate { config, out } => {
            let cfg = load(&config, out)?;
            let outputs = simulate(&cfg)?;
            let files = write_run_outputs(&cfg, &outputs, &cfg.output_dir)?;
            for st in &outputs.stability {
                println!(
                    "stability {} ({}): max A = {:.4}, δ vs δ/2 defect = {:.3e}",
                    st.scenario,
                    st.norm,
                    st.max_amplification(),
                    st.linear_response_defect()
                );
            }
            finish(&cfg, &outputs, Vec::new(), files)
        }
        Command::Verify { config, out } => {
            let cfg = load(&config, out)?;
            let outputs = simulate(&cfg)?;
            let checks = invariant_checks(&cfg, &outputs);
            let files = write_run_outputs(&cfg, &outputs, &cfg.output_dir)?;
            finish(&cfg, &outputs, checks, files)
        }
        Command::Sweep { config, out } => {
            let cfg = load(&config, out)?;
            let mut outputs = RunOutputs::default();
            run_studies(&cfg, &mut outputs, |k| matches!(k, StudyKind::SigmaSweep { .. }))?;
            if outputs.sweeps.is_empty() {
                println!("no sigma_sweep studies configured");
            }
            for sw in &outputs.sweeps {
                println!("sweep {} in {} at T = {}", sw.scenario, sw.norm, sw.t_final);
                for (i, s) in sw.sigmas.iter().enumerate() {
                    println!("  σ = {s:<8} err = {:.6e}  macro = {:.6e}", sw.err[i], sw.err_macro[i]);
                }
                if let Some(f) = sw.fit {
                    println!("  fitted order p = {:.4}", f.slope);
                }
            }
            let mut files = write_study_tables(&outputs, &cfg.output_dir)?;
            files.extend(crate::io::run::emit_study_plots(&outputs, &cfg.output_dir)?);
            let checks = invariant_checks(&cfg, &outputs);
            finish(&cfg, &outputs, checks, files)
        }
        Command::Compare { config, out } => {
            let cfg = load(&config, out)?;
            let mut outputs = RunOutputs::default();
            run_studies(&cfg, &mut outputs, |k| matches!(k, StudyKind::CrossValidate { .. }))?;
            if outputs.cross.is_empty() {
                println!("no cross_validate studies configured");
            }
            for cr in &outputs.cross {
                println!("cross-validation {} (σ = {}, T = {})", cr.scenario, cr.sigma, cr.t_final);
                for r in &cr.rows {
                    println!(
                        "  N = {:<8} grid = {:<5} mass {:.3e}  momentum {:.3e}  energy {:.3e}  histogram {:.3e}",
                        r.n, r.resolution, r.mass, r.momentum, r.energy, r.histogram
                    );
                }
            }
            let files = write_study_tables(&outputs, &cfg.output_dir)?;
            finish(&cfg, &outputs, Vec::new(), files)
        }
        Command::Inspect { snapshot } => {
            let h = read_snapshot_header(&snapshot)?;
            println!("{h}");
            Ok(0)
        }
    }
}
