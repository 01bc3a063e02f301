use crate::error::{Error, Result};
use crate::scalar::Real;

/// Largest particle dimension the snapshot and CSV schemas carry.
pub const MAX_DIM: usize = 3;

/// Run parameters shared by both solvers. The grid solver always uses `d = 1`.
#[derive(Clone, Debug, PartialEq)]
pub struct SimParams<T> {
    pub d: usize,
    pub sigma: T,
    pub dt: T,
    pub t_final: T,
    pub n_particles: usize,
    pub seed: u64,
    pub lx: T,
    pub lv: T,
    pub nx: usize,
    pub nv: usize,
    pub mass: T,
}

impl<T: Real> Default for SimParams<T> {
    fn default() -> Self {
        Self {
            d: 1,
            sigma: T::zero(),
            dt: T::lit(1e-3),
            t_final: T::one(),
            n_particles: 1000,
            seed: 0x5eed,
            lx: T::lit(8.0),
            lv: T::lit(4.0),
            nx: 128,
            nv: 128,
            mass: T::one(),
        }
    }
}

impl<T: Real> SimParams<T> {
    pub fn validate(&self) -> Result<()> {
        let check = |ok: bool, constraint: &str, detail: String| {
            if ok {
                Ok(())
            } else {
                Err(Error::validation(constraint, detail))
            }
        };
        check(
            self.sigma >= T::zero() && self.sigma <= T::one(),
            "0 ≤ σ ≤ 1",
            format!("sigma = {}", self.sigma),
        )?;
        check(
            self.dt > T::zero() && self.dt.is_finite(),
            "dt > 0",
            format!("dt = {}", self.dt),
        )?;
        check(
            self.t_final >= T::zero() && self.t_final.is_finite(),
            "T ≥ 0",
            format!("t_final = {}", self.t_final),
        )?;
        check(self.n_particles >= 1, "N ≥ 1", format!("n = {}", self.n_particles))?;
        check(self.nx >= 4, "Nx ≥ 4", format!("nx = {}", self.nx))?;
        check(self.nv >= 4, "Nv ≥ 4", format!("nv = {}", self.nv))?;
        check(
            self.lx > T::zero() && self.lx.is_finite(),
            "Lx > 0",
            format!("lx = {}", self.lx),
        )?;
        check(
            self.lv > T::zero() && self.lv.is_finite(),
            "Lv > 0",
            format!("lv = {}", self.lv),
        )?;
        check(
            self.mass > T::zero() && self.mass.is_finite(),
            "M > 0",
            format!("mass = {}", self.mass),
        )?;
        check(
            (1..=MAX_DIM).contains(&self.d),
            "1 ≤ d ≤ 3",
            format!("d = {}", self.d),
        )?;
        Ok(())
    }

    /// Number of whole steps needed to reach `t_final`.
    pub fn steps(&self) -> usize {
        (self.t_final / self.dt).round().to_usize().unwrap_or(0)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn constraint_of(p: &SimParams<f64>) -> String {
        match p.validate() {
            Err(Error::Validation { constraint, .. }) => constraint,
            other => panic!("expected validation error, got {other:?}"),
        }
    }

    #[test]
    fn defaults_are_valid() {
        SimParams::<f64>::default().validate().unwrap();
    }

    #[test]
    fn named_constraints() {
        let base = SimParams::<f64>::default();
        assert_eq!(constraint_of(&SimParams { sigma: 1.5, ..base.clone() }), "0 ≤ σ ≤ 1");
        assert_eq!(constraint_of(&SimParams { sigma: -0.1, ..base.clone() }), "0 ≤ σ ≤ 1");
        assert_eq!(constraint_of(&SimParams { dt: 0.0, ..base.clone() }), "dt > 0");
        assert_eq!(constraint_of(&SimParams { nx: 3, ..base.clone() }), "Nx ≥ 4");
        assert_eq!(constraint_of(&SimParams { n_particles: 0, ..base.clone() }), "N ≥ 1");
        assert_eq!(constraint_of(&SimParams { d: 4, ..base }), "1 ≤ d ≤ 3");
    }
}
