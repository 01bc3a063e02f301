use std::fmt;
use std::str::FromStr;

use serde::Serialize;

use crate::diagnostics::Distances;
use crate::error::{Error, Result};
use crate::scalar::Real;

/// Norm used to compare two grid states.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum NormKind {
    L1,
    L2w,
    W11,
    X,
}

impl NormKind {
    pub fn name(self) -> &'static str {
        match self {
            NormKind::L1 => "l1",
            NormKind::L2w => "l2w",
            NormKind::W11 => "w11",
            NormKind::X => "x",
        }
    }

    pub fn pick<T: Copy>(self, d: &Distances<T>) -> T {
        match self {
            NormKind::L1 => d.l1,
            NormKind::L2w => d.l2w,
            NormKind::W11 => d.w11,
            NormKind::X => d.x,
        }
    }
}

impl fmt::Display for NormKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for NormKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "l1" => Ok(NormKind::L1),
            "l2w" | "l2_omega" => Ok(NormKind::L2w),
            "w11" => Ok(NormKind::W11),
            "x" => Ok(NormKind::X),
            other => Err(Error::Config(format!(
                "unknown norm '{other}' (expected l1, l2w, w11 or x)"
            ))),
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub enum StudyKind<T> {
    Stability { delta: T, norm: NormKind },
    SigmaSweep { sigmas: Vec<T>, norm: NormKind },
    /// Runs pair `n_list[i]` particles with a `resolutions[i]²` grid.
    CrossValidate { n_list: Vec<usize>, resolutions: Vec<usize> },
}

impl<T> StudyKind<T> {
    pub fn label(&self) -> &'static str {
        match self {
            StudyKind::Stability { .. } => "stability",
            StudyKind::SigmaSweep { .. } => "sigma_sweep",
            StudyKind::CrossValidate { .. } => "cross_validate",
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct StudySpec<T> {
    pub kind: StudyKind<T>,
    pub scenario: String,
    /// Overrides the scenario's horizon when set.
    pub t_final: Option<T>,
    pub cadence: usize,
}

impl<T: Real> StudySpec<T> {
    pub fn new(kind: StudyKind<T>, scenario: &str) -> Self {
        Self {
            kind,
            scenario: scenario.to_string(),
            t_final: None,
            cadence: 10,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.cadence == 0 {
            return Err(Error::validation("cadence ≥ 1", "cadence = 0"));
        }
        if let Some(t) = self.t_final {
            if !(t > T::zero() && t.is_finite()) {
                return Err(Error::validation("T > 0", format!("T = {t}")));
            }
        }
        match &self.kind {
            StudyKind::Stability { delta, .. } => {
                if !(*delta > T::zero() && delta.is_finite()) {
                    return Err(Error::validation("δ > 0", format!("delta = {delta}")));
                }
            }
            StudyKind::SigmaSweep { sigmas, .. } => {
                if sigmas.is_empty() {
                    return Err(Error::validation("σ list nonempty", "no sigmas given"));
                }
                if sigmas.iter().any(|&s| !(s > T::zero() && s <= T::one())) {
                    return Err(Error::validation("0 ≤ σ ≤ 1", "sweep values must lie in (0, 1]"));
                }
                if sigmas.windows(2).any(|w| w[1] >= w[0]) {
                    return Err(Error::validation(
                        "σ list strictly decreasing",
                        format!("{sigmas:?}"),
                    ));
                }
            }
            StudyKind::CrossValidate { n_list, resolutions } => {
                if n_list.is_empty() || n_list.len() != resolutions.len() {
                    return Err(Error::validation(
                        "one resolution per particle count",
                        format!("{} counts, {} resolutions", n_list.len(), resolutions.len()),
                    ));
                }
                if n_list.contains(&0) {
                    return Err(Error::validation("N ≥ 1", "particle count 0"));
                }
                if resolutions.iter().any(|&r| r < 4) {
                    return Err(Error::validation("Nx ≥ 4", "resolution below 4"));
                }
            }
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn validation() {
        let ok = StudySpec::new(
            StudyKind::SigmaSweep {
                sigmas: vec![0.2f64, 0.1],
                norm: NormKind::L2w,
            },
            "maxwellian",
        );
        ok.validate().unwrap();
        let bad = StudySpec::new(
            StudyKind::SigmaSweep {
                sigmas: vec![0.1f64, 0.2],
                norm: NormKind::L2w,
            },
            "maxwellian",
        );
        assert!(bad.validate().is_err());
        let bad = StudySpec::new(
            StudyKind::Stability {
                delta: 0.0f64,
                norm: NormKind::L1,
            },
            "two_beam",
        );
        assert!(bad.validate().is_err());
        let bad = StudySpec::<f64>::new(
            StudyKind::CrossValidate {
                n_list: vec![10, 20],
                resolutions: vec![32],
            },
            "two_beam",
        );
        assert!(bad.validate().is_err());
    }

    #[test]
    fn norm_names_round_trip() {
        for n in [NormKind::L1, NormKind::L2w, NormKind::W11, NormKind::X] {
            assert_eq!(n.name().parse::<NormKind>().unwrap(), n);
        }
        assert!("l3".parse::<NormKind>().is_err());
    }
}
