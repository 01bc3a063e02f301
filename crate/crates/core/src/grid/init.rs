//! Initial profiles for the phase-space grid.

use crate::error::{Error, Result};
use crate::grid::PhaseGrid;
use crate::model::SimParams;
use crate::scalar::Real;

/// Number of spreads treated as the edge of a Gaussian profile.
pub const GAUSSIAN_EXTENT: f64 = 6.0;

#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Profile<T> {
    /// Product Gaussian in x and v.
    Maxwellian {
        x_center: T,
        v_center: T,
        x_spread: T,
        v_spread: T,
    },
    /// `cos²` bump of half-width `x_width` in x times a `cos²` bump of
    /// radius `r0` in v; velocity support is exactly `[-r0, r0]`.
    BumpCompact { r0: T, x_width: T },
    /// Two `cos²` beams at `±v0`, each of half-width `beam_width`.
    TwoBeam { v0: T, beam_width: T, x_width: T },
    /// Every particle moves with velocity `u` (snapped to a cell centre on the grid).
    RigidFlock { u: T, x_width: T },
}

/// `cos²(π s / 2)` on `|s| < 1`, zero outside.
#[inline]
pub fn cos_bump<T: Real>(s: T) -> T {
    let s = s.abs();
    if s < T::one() {
        let c = (T::FRAC_PI_2() * s).cos();
        c * c
    } else {
        T::zero()
    }
}

impl<T: Real> Profile<T> {
    /// Radius of the velocity support (6 spreads for the Maxwellian).
    pub fn velocity_radius(&self) -> T {
        match *self {
            Profile::Maxwellian {
                v_center, v_spread, ..
            } => v_center.abs() + T::lit(GAUSSIAN_EXTENT) * v_spread,
            Profile::BumpCompact { r0, .. } => r0,
            Profile::TwoBeam { v0, beam_width, .. } => v0.abs() + beam_width,
            Profile::RigidFlock { u, .. } => u.abs(),
        }
    }

    /// Largest |x| carried initially.
    pub fn x_radius(&self) -> T {
        match *self {
            Profile::Maxwellian {
                x_center, x_spread, ..
            } => x_center.abs() + T::lit(GAUSSIAN_EXTENT) * x_spread,
            Profile::BumpCompact { x_width, .. }
            | Profile::TwoBeam { x_width, .. }
            | Profile::RigidFlock { x_width, .. } => x_width,
        }
    }

    /// Unnormalised density at `(x, v)`. `RigidFlock` returns its x-profile
    /// only; it is monokinetic and handled separately.
    pub fn shape(&self, x: T, v: T) -> T {
        match *self {
            Profile::Maxwellian {
                x_center,
                v_center,
                x_spread,
                v_spread,
            } => {
                let zx = (x - x_center) / x_spread;
                let zv = (v - v_center) / v_spread;
                (-(zx * zx + zv * zv) / T::lit(2.0)).exp()
            }
            Profile::BumpCompact { r0, x_width } => cos_bump(x / x_width) * cos_bump(v / r0),
            Profile::TwoBeam {
                v0,
                beam_width,
                x_width,
            } => {
                let beams = cos_bump((v - v0) / beam_width) + cos_bump((v + v0) / beam_width);
                cos_bump(x / x_width) * beams
            }
            Profile::RigidFlock { x_width, .. } => cos_bump(x / x_width),
        }
    }

    fn check(&self) -> Result<()> {
        let positive = |name: &str, v: T| {
            if v > T::zero() && v.is_finite() {
                Ok(())
            } else {
                Err(Error::Config(format!("profile {name} must be > 0, got {v}")))
            }
        };
        match *self {
            Profile::Maxwellian {
                x_spread, v_spread, ..
            } => {
                positive("x_spread", x_spread)?;
                positive("v_spread", v_spread)
            }
            Profile::BumpCompact { r0, x_width } => {
                positive("r0", r0)?;
                positive("x_width", x_width)
            }
            Profile::TwoBeam {
                v0,
                beam_width,
                x_width,
            } => {
                positive("beam_width", beam_width)?;
                positive("x_width", x_width)?;
                if v0.abs() < beam_width {
                    return Err(Error::Config(format!(
                        "two-beam profile needs |v0| >= beam_width, got {v0} < {beam_width}"
                    )));
                }
                Ok(())
            }
            Profile::RigidFlock { x_width, .. } => positive("x_width", x_width),
        }
    }
}

/// Velocity half-extent sized for a run: the noiseless support bound
/// `R0 (1 + M T)` for `σ = 0`, `R0 + 6 sqrt(2σT)` otherwise, each plus a
/// margin of two velocity cells. Never below 1.
pub fn auto_lv<T: Real>(profile: &Profile<T>, sigma: T, t_final: T, mass: T, nv: usize) -> T {
    lv_for_radius(profile.velocity_radius(), sigma, t_final, mass, nv)
}

/// [`auto_lv`] for an explicit initial velocity radius `r0`.
pub fn lv_for_radius<T: Real>(r0: T, sigma: T, t_final: T, mass: T, nv: usize) -> T {
    let bound = if sigma > T::zero() {
        r0 + T::lit(GAUSSIAN_EXTENT) * (T::lit(2.0) * sigma * t_final).sqrt()
    } else {
        r0 * (T::one() + mass * t_final)
    };
    let margin = T::one() - T::lit(4.0) / T::from_count(nv);
    (bound / margin * (T::one() + T::lit(1e-9))).max(T::one())
}

/// Position half-extent sized for a run: the initial x-radius plus the
/// distance travelled by the fastest characteristic up to `T`, with a margin
/// of two cells. Alignment never widens the velocity support, so without noise
/// the speed is bounded by the initial velocity radius and the reach is padded
/// by half again for upwind smearing; with noise the `R0 + 6 sqrt(2σT)`
/// envelope of [`auto_lv`] is used as is.
pub fn auto_lx<T: Real>(profile: &Profile<T>, sigma: T, t_final: T, nx: usize) -> T {
    let r0 = profile.velocity_radius();
    let reach = if sigma > T::zero() {
        let speed = r0 + T::lit(GAUSSIAN_EXTENT) * (T::lit(2.0) * sigma * t_final).sqrt();
        profile.x_radius() + speed * t_final
    } else {
        T::lit(1.5) * (profile.x_radius() + r0 * t_final)
    };
    let margin = T::one() - T::lit(4.0) / T::from_count(nx);
    (reach / margin).max(T::one())
}

/// Builds the initial grid: profile values at cell centres, normalised to mass `M`.
pub fn init_grid<T: Real>(profile: &Profile<T>, params: &SimParams<T>) -> Result<PhaseGrid<T>> {
    params.validate()?;
    profile.check()?;
    let mut f = PhaseGrid::zeros(params.nx, params.nv, params.lx, params.lv);
    let dv = f.dv();

    if profile.x_radius() > params.lx {
        return Err(Error::Config(format!(
            "profile x-support {} exceeds Lx = {}",
            profile.x_radius(),
            params.lx
        )));
    }
    let r0 = profile.velocity_radius();
    if r0 > params.lv {
        return Err(Error::Config(format!(
            "profile velocity support {r0} exceeds Lv = {}",
            params.lv
        )));
    }
    if params.sigma == T::zero() {
        let needed = r0 * (T::one() + params.mass * params.t_final) + T::lit(2.0) * dv;
        if params.lv < needed {
            return Err(Error::Config(format!(
                "Lv = {} is below the noiseless support bound R0(1 + M T) + 2Δv = {needed}",
                params.lv
            )));
        }
    }

    let xs = f.x_axis().centers();
    let vs = f.v_axis().centers();
    match *profile {
        Profile::RigidFlock { u, .. } => {
            let k = f
                .v_axis()
                .cell_of(u)
                .ok_or_else(|| Error::Config(format!("flock velocity {u} outside grid")))?;
            for (j, &x) in xs.iter().enumerate() {
                f.set(j, k, profile.shape(x, u));
            }
        }
        _ => {
            for (j, &x) in xs.iter().enumerate() {
                for (k, &v) in vs.iter().enumerate() {
                    f.set(j, k, profile.shape(x, v));
                }
            }
        }
    }
    let m = f.mass();
    if !(m > T::zero()) {
        return Err(Error::Config(
            "profile is not resolved by the grid (zero mass at cell centres)".into(),
        ));
    }
    f.scale(params.mass / m);
    Ok(f)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn params() -> SimParams<f64> {
        SimParams {
            nx: 64,
            nv: 64,
            lx: 4.0,
            lv: 3.0,
            t_final: 1.0,
            ..Default::default()
        }
    }

    #[test]
    fn bump_support_is_exact() {
        let f = init_grid(&Profile::BumpCompact { r0: 1.0, x_width: 2.0 }, &params()).unwrap();
        for j in 0..f.nx() {
            for k in 0..f.nv() {
                if f.v_axis().center(k).abs() > 1.0 {
                    assert_eq!(f.get(j, k), 0.0);
                }
            }
        }
        assert!((f.mass() - 1.0).abs() < 1e-13);
    }

    #[test]
    fn maxwellian_normalised() {
        let p = Profile::Maxwellian {
            x_center: 0.3,
            v_center: -0.1,
            x_spread: 0.5,
            v_spread: 0.2,
        };
        let f = init_grid(&p, &SimParams { mass: 2.5, t_final: 0.1, ..params() }).unwrap();
        assert!((f.mass() - 2.5).abs() < 1e-13);
    }

    #[test]
    fn two_beam_is_symmetric() {
        let p = Profile::TwoBeam {
            v0: 1.0,
            beam_width: 0.3,
            x_width: 2.0,
        };
        let f = init_grid(&p, &SimParams { lv: 3.0, ..params() }).unwrap();
        let nv = f.nv();
        for j in 0..f.nx() {
            for k in 0..nv {
                assert_eq!(f.get(j, k), f.get(j, nv - 1 - k));
            }
        }
    }

    #[test]
    fn support_must_fit() {
        let p = Profile::BumpCompact { r0: 1.0, x_width: 5.0 };
        assert!(matches!(init_grid(&p, &params()), Err(Error::Config(_))));
        // Noiseless runs need room for R0 (1 + M T).
        let p = Profile::BumpCompact { r0: 1.0, x_width: 1.0 };
        let short = SimParams { lv: 1.9, ..params() };
        assert!(matches!(init_grid(&p, &short), Err(Error::Config(_))));
        let noisy = SimParams { lv: 1.9, sigma: 0.1, ..params() };
        assert!(init_grid(&p, &noisy).is_ok());
    }

    #[test]
    fn auto_lv_covers_bound() {
        let p = Profile::TwoBeam {
            v0: 1.0,
            beam_width: 0.25,
            x_width: 2.0,
        };
        let lv: f64 = auto_lv(&p, 0.0, 2.0, 1.0, 128);
        let dv = 2.0 * lv / 128.0;
        assert!(lv >= 1.25 * 3.0 + 2.0 * dv);
        let sp = SimParams {
            lv,
            t_final: 2.0,
            nx: 128,
            nv: 128,
            lx: 8.0,
            ..Default::default()
        };
        init_grid(&p, &sp).unwrap();
    }
}
