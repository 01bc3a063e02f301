use crate::error::{Error, Result};
use crate::grid::{auto_lv, auto_lx, cfl_dt, init_grid, PhaseGrid, Profile};
use crate::model::{KernelSpec, SimParams, WeightSpec};
use crate::scalar::Real;

/// A fully specified initial-value problem.
#[derive(Clone, Debug, PartialEq)]
pub struct Scenario<T> {
    pub name: String,
    pub profile: Profile<T>,
    pub params: SimParams<T>,
    pub kernel: KernelSpec<T>,
    pub weights: WeightSpec<T>,
    /// Size `Lv` from the run's support bound instead of `params.lv`.
    pub auto_lv: bool,
    /// Size `Lx` from the initial x-support and the velocity envelope instead of `params.lx`.
    pub auto_lx: bool,
}

pub const BUILTIN_SCENARIOS: [&str; 4] = ["two_beam", "bump_compact", "maxwellian", "rigid_flock"];

impl<T: Real> Scenario<T> {
    pub fn builtin(name: &str) -> Result<Self> {
        let l = T::lit;
        let profile = match name {
            "two_beam" => Profile::TwoBeam {
                v0: l(1.0),
                beam_width: l(0.25),
                x_width: l(2.0),
            },
            "bump_compact" => Profile::BumpCompact {
                r0: l(1.0),
                x_width: l(2.0),
            },
            "maxwellian" => Profile::Maxwellian {
                x_center: l(0.0),
                v_center: l(0.3),
                x_spread: l(0.6),
                v_spread: l(0.3),
            },
            "rigid_flock" => Profile::RigidFlock {
                u: l(0.5),
                x_width: l(2.0),
            },
            other => {
                return Err(Error::Config(format!(
                    "unknown scenario '{other}' (known: {})",
                    BUILTIN_SCENARIOS.join(", ")
                )))
            }
        };
        let kernel = if name == "rigid_flock" {
            KernelSpec::constant(T::one())?
        } else {
            KernelSpec::default()
        };
        let params = SimParams {
            t_final: l(2.0),
            dt: l(1e-3),
            ..SimParams::default()
        };
        Ok(Self {
            name: name.to_string(),
            profile,
            params,
            kernel,
            weights: WeightSpec::default(),
            auto_lv: true,
            auto_lx: true,
        })
    }

    /// Parameters with automatic extents resolved.
    pub fn resolved_params(&self) -> SimParams<T> {
        let mut p = self.params.clone();
        if self.auto_lv {
            p.lv = auto_lv(&self.profile, p.sigma, p.t_final, p.mass, p.nv);
        }
        if self.auto_lx {
            p.lx = auto_lx(&self.profile, p.sigma, p.t_final, p.nx);
        }
        p
    }

    /// Freezes the automatic extents at their current values.
    pub fn resolve_extents(&mut self) {
        self.params = self.resolved_params();
        self.auto_lv = false;
        self.auto_lx = false;
    }

    pub fn with_sigma(mut self, sigma: T) -> Self {
        self.params.sigma = sigma;
        self
    }

    pub fn with_resolution(mut self, nx: usize, nv: usize) -> Self {
        self.params.nx = nx;
        self.params.nv = nv;
        self
    }

    pub fn with_horizon(mut self, t_final: T, dt: T) -> Self {
        self.params.t_final = t_final;
        self.params.dt = dt;
        self
    }

    pub fn initial_grid(&self) -> Result<PhaseGrid<T>> {
        init_grid(&self.profile, &self.resolved_params())
    }

    /// Full validation: parameters, profile fit and CFL feasibility of `dt`.
    pub fn validate(&self) -> Result<()> {
        let p = self.resolved_params();
        p.validate()?;
        init_grid(&self.profile, &p)?;
        let limit = cfl_dt(p.nx, p.nv, p.lx, p.lv, p.mass, &self.kernel, T::one());
        if p.dt > limit {
            return Err(Error::validation(
                "CFL",
                format!("dt = {} exceeds the advective limit {limit}", p.dt),
            ));
        }
        Ok(())
    }
}
