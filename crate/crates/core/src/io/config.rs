//! Line-oriented `key = value` configuration with `[section]` headers.
//!
//! ```text
//! # comments start with '#'
//! [run]
//! scenario = two_beam
//! solver = grid            # grid | particle | both
//!
//! [params]
//! sigma = 0.1
//! lv = auto
//!
//! [study]                  # may repeat
//! kind = sigma_sweep
//! sigmas = 0.2, 0.1, 0.05
//! ```

use std::collections::HashSet;
use std::path::{Path, PathBuf};

use crate::error::{Error, Result};
use crate::experiments::{NormKind, Scenario, StudyKind, StudySpec};
use crate::grid::{cfl_dt, DiffusionScheme, Profile, Reconstruction};
use crate::model::{FieldMethod, KernelSpec, KernelVariant, WeightSpec};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SolverKind {
    Grid,
    Particle,
    Both,
}

impl SolverKind {
    pub fn runs_grid(self) -> bool {
        matches!(self, SolverKind::Grid | SolverKind::Both)
    }

    pub fn runs_particles(self) -> bool {
        matches!(self, SolverKind::Particle | SolverKind::Both)
    }
}

/// Validated run description.
#[derive(Clone, Debug, PartialEq)]
pub struct RunConfig {
    pub scenario: Scenario<f64>,
    pub solver: SolverKind,
    pub studies: Vec<StudySpec<f64>>,
    pub output_dir: PathBuf,
    /// Record diagnostics every `cadence` steps.
    pub cadence: usize,
    pub field_method: FieldMethod,
    pub diffusion: DiffusionScheme,
    pub reconstruction: Reconstruction,
}

impl RunConfig {
    /// Study base scenario: the configured one when the names match, else the builtin.
    pub fn study_scenario(&self, spec: &StudySpec<f64>) -> Result<Scenario<f64>> {
        if spec.scenario == self.scenario.name {
            Ok(self.scenario.clone())
        } else {
            Scenario::builtin(&spec.scenario)
        }
    }
}

pub fn load_config(path: &Path) -> Result<RunConfig> {
    let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    parse_config(&text)
}

#[derive(Debug)]
struct Entry {
    line: usize,
    column: usize,
    key: String,
    value: String,
}

#[derive(Debug)]
struct Section {
    name: String,
    line: usize,
    entries: Vec<Entry>,
}

const SECTIONS: [&str; 6] = ["run", "kernel", "params", "weight", "profile", "study"];

fn tokenize(text: &str) -> Result<Vec<Section>> {
    let mut sections: Vec<Section> = Vec::new();
    for (idx, raw) in text.lines().enumerate() {
        let line = idx + 1;
        let content = raw.split('#').next().unwrap_or("");
        let trimmed = content.trim();
        if trimmed.is_empty() {
            continue;
        }
        let indent = content.len() - content.trim_start().len() + 1;
        if let Some(rest) = trimmed.strip_prefix('[') {
            let Some(name) = rest.strip_suffix(']') else {
                return Err(Error::Parse {
                    line,
                    column: indent + trimmed.len(),
                    message: "expected ']' to close the section header".into(),
                });
            };
            let name = name.trim().to_ascii_lowercase();
            if !SECTIONS.contains(&name.as_str()) {
                return Err(Error::Parse {
                    line,
                    column: indent + 1,
                    message: format!("unknown section [{name}] (known: {})", SECTIONS.join(", ")),
                });
            }
            if name != "study" && sections.iter().any(|s| s.name == name) {
                return Err(Error::Parse {
                    line,
                    column: indent,
                    message: format!("section [{name}] appears twice"),
                });
            }
            sections.push(Section {
                name,
                line,
                entries: Vec::new(),
            });
            continue;
        }
        let Some(eq) = content.find('=') else {
            return Err(Error::Parse {
                line,
                column: indent,
                message: "expected 'key = value'".into(),
            });
        };
        let key = content[..eq].trim().to_ascii_lowercase();
        let value = content[eq + 1..].trim().to_string();
        if key.is_empty() {
            return Err(Error::Parse {
                line,
                column: indent,
                message: "missing key before '='".into(),
            });
        }
        if value.is_empty() {
            return Err(Error::Parse {
                line,
                column: eq + 2,
                message: format!("missing value for '{key}'"),
            });
        }
        let Some(section) = sections.last_mut() else {
            return Err(Error::Parse {
                line,
                column: indent,
                message: "key outside of any [section]".into(),
            });
        };
        if section.entries.iter().any(|e| e.key == key) {
            return Err(Error::Parse {
                line,
                column: indent,
                message: format!("duplicate key '{key}'"),
            });
        }
        section.entries.push(Entry {
            line,
            column: eq + 2 + (content[eq + 1..].len() - content[eq + 1..].trim_start().len()),
            key,
            value,
        });
    }
    Ok(sections)
}

impl Entry {
    fn err(&self, message: impl Into<String>) -> Error {
        Error::Parse {
            line: self.line,
            column: self.column,
            message: message.into(),
        }
    }

    fn f64(&self) -> Result<f64> {
        let x: f64 = self
            .value
            .parse()
            .map_err(|_| self.err(format!("'{}' is not a number", self.value)))?;
        if !x.is_finite() {
            return Err(self.err(format!("'{}' is not finite", self.value)));
        }
        Ok(x)
    }

    fn usize(&self) -> Result<usize> {
        self.value
            .parse()
            .map_err(|_| self.err(format!("'{}' is not a nonnegative integer", self.value)))
    }

    fn u64(&self) -> Result<u64> {
        let v = self.value.as_str();
        let parsed = match v.strip_prefix("0x") {
            Some(hex) => u64::from_str_radix(hex, 16),
            None => v.parse(),
        };
        parsed.map_err(|_| self.err(format!("'{v}' is not an unsigned integer")))
    }

    /// `None` for the literal `auto`.
    fn auto_f64(&self) -> Result<Option<f64>> {
        if self.value.eq_ignore_ascii_case("auto") {
            Ok(None)
        } else {
            self.f64().map(Some)
        }
    }

    fn list<T>(&self, parse: impl Fn(&str) -> Option<T>) -> Result<Vec<T>> {
        self.value
            .split(',')
            .map(|s| {
                let s = s.trim();
                parse(s).ok_or_else(|| self.err(format!("bad list item '{s}'")))
            })
            .collect()
    }

    fn word(&self) -> String {
        self.value.to_ascii_lowercase()
    }

    /// Attaches this entry's line to a validation error.
    fn locate(&self, e: Error) -> Error {
        match e {
            Error::Validation { constraint, detail } => Error::Validation {
                constraint,
                detail: format!("line {}: {detail}", self.line),
            },
            other => other,
        }
    }
}

fn unknown_key(e: &Entry, section: &str) -> Error {
    e.err(format!("unknown key '{}' in [{section}]", e.key))
}

/// Parses and fully validates a configuration.
pub fn parse_config(text: &str) -> Result<RunConfig> {
    let sections = tokenize(text)?;
    let find = |name: &str| sections.iter().find(|s| s.name == name);

    let mut scenario_name = "two_beam".to_string();
    let mut solver = SolverKind::Grid;
    let mut output_dir = PathBuf::from("kcs-out");
    let mut cadence = 10usize;
    let mut field_method = FieldMethod::Direct;
    let mut diffusion = DiffusionScheme::Implicit;
    let mut reconstruction = Reconstruction::Upwind;
    if let Some(run) = find("run") {
        for e in &run.entries {
            match e.key.as_str() {
                "scenario" => scenario_name = e.word(),
                "solver" => {
                    solver = match e.word().as_str() {
                        "grid" => SolverKind::Grid,
                        "particle" | "particles" => SolverKind::Particle,
                        "both" => SolverKind::Both,
                        other => return Err(e.err(format!("unknown solver '{other}'"))),
                    }
                }
                "output" => output_dir = PathBuf::from(&e.value),
                "cadence" => {
                    cadence = e.usize()?;
                    if cadence == 0 {
                        return Err(Error::validation("cadence ≥ 1", format!("line {}: cadence = 0", e.line)));
                    }
                }
                "field_method" => {
                    field_method = match e.word().as_str() {
                        "direct" => FieldMethod::Direct,
                        "fft" => FieldMethod::Fft,
                        other => return Err(e.err(format!("unknown field method '{other}'"))),
                    }
                }
                "diffusion" => {
                    diffusion = match e.word().as_str() {
                        "implicit" => DiffusionScheme::Implicit,
                        "explicit" => DiffusionScheme::Explicit,
                        other => return Err(e.err(format!("unknown diffusion scheme '{other}'"))),
                    }
                }
                "reconstruction" => {
                    reconstruction = match e.word().as_str() {
                        "upwind" => Reconstruction::Upwind,
                        "muscl" => Reconstruction::Muscl,
                        other => return Err(e.err(format!("unknown reconstruction '{other}'"))),
                    }
                }
                _ => return Err(unknown_key(e, "run")),
            }
        }
    }
    let mut scenario = Scenario::<f64>::builtin(&scenario_name).map_err(|err| match find("run")
        .and_then(|r| r.entries.iter().find(|e| e.key == "scenario"))
    {
        Some(e) => e.err(err.to_string()),
        None => err,
    })?;

    if let Some(sec) = find("kernel") {
        apply_kernel(sec, &mut scenario)?;
    }
    let mut dt_auto = false;
    if let Some(sec) = find("params") {
        dt_auto = apply_params(sec, &mut scenario)?;
    }
    if let Some(sec) = find("weight") {
        for e in &sec.entries {
            match e.key.as_str() {
                "alpha" => scenario.weights = WeightSpec::new(e.f64()?).map_err(|x| e.locate(x))?,
                _ => return Err(unknown_key(e, "weight")),
            }
        }
    }
    if let Some(sec) = find("profile") {
        apply_profile(sec, &mut scenario)?;
    }

    if dt_auto {
        let p = scenario.resolved_params();
        scenario.params.dt = cfl_dt(p.nx, p.nv, p.lx, p.lv, p.mass, &scenario.kernel, 0.5);
    }
    scenario.validate().map_err(|err| match err {
        Error::Validation { constraint, detail } => {
            let line = find("params").map(|s| s.line).unwrap_or(0);
            Error::Validation {
                constraint,
                detail: format!("[params] at line {line}: {detail}"),
            }
        }
        other => other,
    })?;

    let mut studies = Vec::new();
    for sec in sections.iter().filter(|s| s.name == "study") {
        let spec = parse_study(sec, &scenario.name, cadence)?;
        let base = if spec.scenario == scenario.name {
            scenario.clone()
        } else {
            Scenario::builtin(&spec.scenario)?
        };
        base.validate()?;
        studies.push(spec);
    }

    Ok(RunConfig {
        scenario,
        solver,
        studies,
        output_dir,
        cadence,
        field_method,
        diffusion,
        reconstruction,
    })
}

fn apply_kernel(sec: &Section, s: &mut Scenario<f64>) -> Result<()> {
    let mut kind: Option<&Entry> = None;
    let mut beta = None;
    let mut value = None;
    for e in &sec.entries {
        match e.key.as_str() {
            "kind" => kind = Some(e),
            "beta" => beta = Some((e, e.f64()?)),
            "value" | "c" => value = Some((e, e.f64()?)),
            _ => return Err(unknown_key(e, "kernel")),
        }
    }
    let variant = match kind.map(|e| (e, e.word())) {
        Some((_, w)) if w == "constant" => KernelVariant::Constant(value.map(|v| v.1).unwrap_or(1.0)),
        Some((_, w)) if w == "algebraic" || w == "algebraic_decay" => {
            KernelVariant::AlgebraicDecay(beta.map(|v| v.1).unwrap_or(1.0))
        }
        Some((e, w)) => return Err(e.err(format!("unknown kernel kind '{w}' (constant or algebraic)"))),
        None => match (beta, value, s.kernel.variant()) {
            (Some((_, b)), _, _) => KernelVariant::AlgebraicDecay(b),
            (None, Some((_, c)), _) => KernelVariant::Constant(c),
            (None, None, v) => v,
        },
    };
    let line = kind
        .or(beta.map(|b| b.0))
        .or(value.map(|v| v.0))
        .map(|e| e.line)
        .unwrap_or(sec.line);
    s.kernel = KernelSpec::new(variant).map_err(|err| match err {
        Error::KernelBounds { quantity, value } => Error::Validation {
            constraint: "max{|φ|, |φ'|, |φ''|} ≤ 1".into(),
            detail: format!("line {line}: {quantity} reaches {value}"),
        },
        Error::Validation { constraint, detail } => Error::Validation {
            constraint,
            detail: format!("line {line}: {detail}"),
        },
        other => other,
    })?;
    Ok(())
}

/// Returns whether `dt = auto` was requested.
fn apply_params(sec: &Section, s: &mut Scenario<f64>) -> Result<bool> {
    let mut dt_auto = false;
    for e in &sec.entries {
        let p = &mut s.params;
        match e.key.as_str() {
            "d" => p.d = e.usize()?,
            "sigma" => p.sigma = e.f64()?,
            "dt" => match e.auto_f64()? {
                Some(dt) => p.dt = dt,
                None => dt_auto = true,
            },
            "t_final" | "t" => p.t_final = e.f64()?,
            "n_particles" | "n" => p.n_particles = e.usize()?,
            "seed" => p.seed = e.u64()?,
            "lx" => match e.auto_f64()? {
                Some(v) => {
                    p.lx = v;
                    s.auto_lx = false;
                }
                None => s.auto_lx = true,
            },
            "lv" => match e.auto_f64()? {
                Some(v) => {
                    p.lv = v;
                    s.auto_lv = false;
                }
                None => s.auto_lv = true,
            },
            "nx" => p.nx = e.usize()?,
            "nv" => p.nv = e.usize()?,
            "mass" => p.mass = e.f64()?,
            _ => return Err(unknown_key(e, "params")),
        }
        if e.key == "sigma" && !(0.0..=1.0).contains(&s.params.sigma) {
            return Err(e.locate(Error::validation(
                "0 ≤ σ ≤ 1",
                format!("sigma = {}", s.params.sigma),
            )));
        }
    }
    Ok(dt_auto)
}

fn apply_profile(sec: &Section, s: &mut Scenario<f64>) -> Result<()> {
    let mut profile = s.profile;
    if let Some(e) = sec.entries.iter().find(|e| e.key == "kind") {
        profile = match e.word().as_str() {
            "maxwellian" => Scenario::<f64>::builtin("maxwellian")?.profile,
            "bump_compact" => Scenario::<f64>::builtin("bump_compact")?.profile,
            "two_beam" => Scenario::<f64>::builtin("two_beam")?.profile,
            "rigid_flock" => Scenario::<f64>::builtin("rigid_flock")?.profile,
            other => return Err(e.err(format!("unknown profile kind '{other}'"))),
        };
    }
    for e in sec.entries.iter().filter(|e| e.key != "kind") {
        let x = e.f64()?;
        let slot = match (&mut profile, e.key.as_str()) {
            (Profile::Maxwellian { x_center, .. }, "x_center") => x_center,
            (Profile::Maxwellian { v_center, .. }, "v_center") => v_center,
            (Profile::Maxwellian { x_spread, .. }, "x_spread") => x_spread,
            (Profile::Maxwellian { v_spread, .. }, "v_spread") => v_spread,
            (Profile::BumpCompact { r0, .. }, "r0") => r0,
            (Profile::BumpCompact { x_width, .. }, "x_width") => x_width,
            (Profile::TwoBeam { v0, .. }, "v0") => v0,
            (Profile::TwoBeam { beam_width, .. }, "beam_width") => beam_width,
            (Profile::TwoBeam { x_width, .. }, "x_width") => x_width,
            (Profile::RigidFlock { u, .. }, "u") => u,
            (Profile::RigidFlock { x_width, .. }, "x_width") => x_width,
            _ => return Err(e.err(format!("key '{}' does not belong to this profile", e.key))),
        };
        *slot = x;
    }
    s.profile = profile;
    Ok(())
}

fn parse_study(sec: &Section, default_scenario: &str, default_cadence: usize) -> Result<StudySpec<f64>> {
    let get = |k: &str| sec.entries.iter().find(|e| e.key == k);
    let known: HashSet<&str> = [
        "kind",
        "scenario",
        "t_final",
        "cadence",
        "delta",
        "norm",
        "sigmas",
        "n_list",
        "resolutions",
    ]
    .into_iter()
    .collect();
    if let Some(e) = sec.entries.iter().find(|e| !known.contains(e.key.as_str())) {
        return Err(unknown_key(e, "study"));
    }
    let kind_entry = get("kind").ok_or_else(|| Error::Parse {
        line: sec.line,
        column: 1,
        message: "[study] needs a 'kind' (stability, sigma_sweep or cross_validate)".into(),
    })?;
    let norm = |default: NormKind| -> Result<NormKind> {
        match get("norm") {
            Some(e) => e.value.parse().map_err(|x: Error| e.err(x.to_string())),
            None => Ok(default),
        }
    };
    let required = |k: &str| {
        get(k).ok_or_else(|| Error::Parse {
            line: sec.line,
            column: 1,
            message: format!("[study] of kind {} needs '{k}'", kind_entry.value),
        })
    };
    let kind = match kind_entry.word().as_str() {
        "stability" => StudyKind::Stability {
            delta: required("delta")?.f64()?,
            norm: norm(NormKind::L1)?,
        },
        "sigma_sweep" | "sweep" => StudyKind::SigmaSweep {
            sigmas: required("sigmas")?.list(|s| s.parse::<f64>().ok())?,
            norm: norm(NormKind::L2w)?,
        },
        "cross_validate" | "cross_validation" => StudyKind::CrossValidate {
            n_list: required("n_list")?.list(|s| s.parse::<usize>().ok())?,
            resolutions: required("resolutions")?.list(|s| s.parse::<usize>().ok())?,
        },
        other => return Err(kind_entry.err(format!("unknown study kind '{other}'"))),
    };
    let spec = StudySpec {
        kind,
        scenario: get("scenario").map(|e| e.word()).unwrap_or_else(|| default_scenario.to_string()),
        t_final: get("t_final").map(|e| e.f64()).transpose()?,
        cadence: get("cadence").map(|e| e.usize()).transpose()?.unwrap_or(default_cadence),
    };
    spec.validate().map_err(|err| match err {
        Error::Validation { constraint, detail } => Error::Validation {
            constraint,
            detail: format!("[study] at line {}: {detail}", sec.line),
        },
        other => other,
    })?;
    Ok(spec)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn empty_config_is_all_defaults() {
        let c = parse_config("").unwrap();
        assert_eq!(c.scenario.name, "two_beam");
        assert_eq!(c.solver, SolverKind::Grid);
        assert!(c.studies.is_empty());
    }

    #[test]
    fn parse_errors_carry_positions() {
        match parse_config("[run]\nscenario two_beam\n") {
            Err(Error::Parse { line, .. }) => assert_eq!(line, 2),
            other => panic!("{other:?}"),
        }
        match parse_config("[run]\n  [bogus]\n") {
            Err(Error::Parse { line, column, .. }) => assert_eq!((line, column), (2, 4)),
            other => panic!("{other:?}"),
        }
        match parse_config("[params]\nsigma = abc\n") {
            Err(Error::Parse { line, column, .. }) => assert_eq!((line, column), (2, 9)),
            other => panic!("{other:?}"),
        }
        assert!(matches!(parse_config("sigma = 1\n"), Err(Error::Parse { line: 1, .. })));
        assert!(matches!(
            parse_config("[params]\nsigma = 0\nsigma = 0\n"),
            Err(Error::Parse { line: 3, .. })
        ));
    }
}
