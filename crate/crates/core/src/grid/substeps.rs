//! The three conservative sub-steps of the splitting: x-transport, v-drift
//! under `L[f]`, and v-diffusion. Each returns a fresh grid.

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::grid::PhaseGrid;
use crate::model::FieldPair;
use crate::scalar::Real;

#[inline]
fn minmod<T: Real>(a: T, b: T) -> T {
    if a * b <= T::zero() {
        T::zero()
    } else if a.abs() < b.abs() {
        a
    } else {
        b
    }
}

/// Face reconstruction used by the two advective sub-steps.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum Reconstruction {
    /// Piecewise constant, forward Euler. Positive for Courant numbers up to 1.
    #[default]
    Upwind,
    /// Minmod-limited piecewise linear with a two-stage SSP Runge–Kutta step.
    /// Positive for Courant numbers up to 1/2.
    Muscl,
}

impl Reconstruction {
    fn courant_limit<T: Real>(self) -> T {
        match self {
            Reconstruction::Upwind => T::one(),
            Reconstruction::Muscl => T::lit(0.5),
        }
    }
}

/// `u_{n+1} = (u + E(E(u))) / 2` for a forward-Euler stage `E`.
fn ssp_rk2<T: Real>(u: &[T], stage: impl Fn(&[T]) -> Vec<T>) -> Vec<T> {
    let u1 = stage(u);
    let u2 = stage(&u1);
    let half = T::lit(0.5);
    u.par_iter().zip(u2).map(|(&a, b)| half * (a + b)).collect()
}

/// First-order upwind update of `∂t f + v ∂x f = 0` on every v-row with
/// zero inflow at both x-boundaries.
pub fn substep_transport_x<T: Real>(f: &PhaseGrid<T>, dt: T) -> Result<PhaseGrid<T>> {
    substep_transport_x_with(f, dt, Reconstruction::Upwind)
}

pub fn substep_transport_x_with<T: Real>(
    f: &PhaseGrid<T>,
    dt: T,
    recon: Reconstruction,
) -> Result<PhaseGrid<T>> {
    let (nx, nv) = (f.nx(), f.nv());
    let vs = f.v_axis().centers();
    let lambda = dt / f.dx();
    let vmax = vs.iter().fold(T::zero(), |m, v| m.max(v.abs()));
    let courant = vmax * lambda;
    if !(courant <= recon.courant_limit()) {
        return Err(Error::StepSize(format!(
            "transport CFL violated: max|v| dt / dx = {courant}"
        )));
    }
    let stage = |src: &[T]| -> Vec<T> {
        let cell = |j: isize, k: usize| -> T {
            if j >= 0 && (j as usize) < nx {
                src[j as usize * nv + k]
            } else {
                T::zero()
            }
        };
        let slope = |j: isize, k: usize| -> T {
            match recon {
                Reconstruction::Upwind => T::zero(),
                Reconstruction::Muscl if j < 0 || j as usize >= nx => T::zero(),
                Reconstruction::Muscl => {
                    let c = cell(j, k);
                    minmod(c - cell(j - 1, k), cell(j + 1, k) - c)
                }
            }
        };
        let half = T::lit(0.5);
        // Flux through the right face of cell j in row k; cells outside are empty.
        let flux = |j: isize, k: usize| -> T {
            let v = vs[k];
            if v > T::zero() {
                v * (cell(j, k) + half * slope(j, k))
            } else {
                v * (cell(j + 1, k) - half * slope(j + 1, k))
            }
        };
        let mut out = vec![T::zero(); nx * nv];
        out.par_chunks_mut(nv).enumerate().for_each(|(j, col)| {
            for (k, o) in col.iter_mut().enumerate() {
                let fr = flux(j as isize, k);
                let fl = flux(j as isize - 1, k);
                *o = src[j * nv + k] - lambda * (fr - fl);
            }
        });
        out
    };
    let out = match recon {
        Reconstruction::Upwind => stage(f.values()),
        Reconstruction::Muscl => ssp_rk2(f.values(), stage),
    };
    Ok(f.with_values(out))
}

/// Conservative upwind update of `∂t f + ∂v(L f) = 0` per x-column with
/// `L = b(x_j) - a(x_j) v` evaluated at the v-faces; zero flux at ±Lv.
pub fn substep_drift_v<T: Real>(f: &PhaseGrid<T>, fp: &FieldPair<T>, dt: T) -> Result<PhaseGrid<T>> {
    substep_drift_v_with(f, fp, dt, Reconstruction::Upwind)
}

pub fn substep_drift_v_with<T: Real>(
    f: &PhaseGrid<T>,
    fp: &FieldPair<T>,
    dt: T,
    recon: Reconstruction,
) -> Result<PhaseGrid<T>> {
    let (nx, nv) = (f.nx(), f.nv());
    if fp.len() != nx {
        return Err(Error::Geometry(format!(
            "field has {} samples, grid has {nx} columns",
            fp.len()
        )));
    }
    let vax = *f.v_axis();
    let faces: Vec<T> = (0..=nv).map(|k| vax.face(k)).collect();
    let mu = dt / f.dv();

    let mut worst = T::zero();
    for j in 0..nx {
        // L is affine in v, so its extremes sit on the outermost interior faces.
        for &vf in [faces[1], faces[nv - 1]].iter() {
            worst = worst.max((fp.b[j] - fp.a[j] * vf).abs());
        }
    }
    let courant = worst * mu;
    if !(courant <= recon.courant_limit()) {
        return Err(Error::StepSize(format!(
            "drift CFL violated: max|L| dt / dv = {courant}"
        )));
    }

    let half = T::lit(0.5);
    let stage = |src: &[T]| -> Vec<T> {
        let mut out = vec![T::zero(); nx * nv];
        out.par_chunks_mut(nv).enumerate().for_each(|(j, col)| {
            let (a, b) = (fp.a[j], fp.b[j]);
            let c = &src[j * nv..(j + 1) * nv];
            let slope = |k: usize| -> T {
                if recon == Reconstruction::Upwind || k == 0 || k + 1 == nv {
                    T::zero()
                } else {
                    minmod(c[k] - c[k - 1], c[k + 1] - c[k])
                }
            };
            // flux through the lower face of cell k
            let flux = |k: usize| -> T {
                if k == 0 || k == nv {
                    return T::zero();
                }
                let l = b - a * faces[k];
                if l > T::zero() {
                    l * (c[k - 1] + half * slope(k - 1))
                } else {
                    l * (c[k] - half * slope(k))
                }
            };
            let mut lower = flux(0);
            for k in 0..nv {
                let upper = flux(k + 1);
                col[k] = c[k] - mu * (upper - lower);
                lower = upper;
            }
        });
        out
    };
    let out = match recon {
        Reconstruction::Upwind => stage(f.values()),
        Reconstruction::Muscl => ssp_rk2(f.values(), stage),
    };
    Ok(f.with_values(out))
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum DiffusionScheme {
    /// Backward Euler, tridiagonal solve per column. Unconditionally stable.
    #[default]
    Implicit,
    /// Forward Euler; used only when `σ dt / Δv² ≤ 1/2`, otherwise falls
    /// back to the implicit path.
    Explicit,
}

/// `∂t f = σ ∂vv f` with zero-flux boundaries in v.
pub fn substep_diffuse_v<T: Real>(f: &PhaseGrid<T>, sigma: T, dt: T) -> Result<PhaseGrid<T>> {
    substep_diffuse_v_with(f, sigma, dt, DiffusionScheme::Implicit)
}

pub fn substep_diffuse_v_with<T: Real>(
    f: &PhaseGrid<T>,
    sigma: T,
    dt: T,
    scheme: DiffusionScheme,
) -> Result<PhaseGrid<T>> {
    if !(sigma >= T::zero()) {
        return Err(Error::Domain(format!("sigma must be >= 0, got {sigma}")));
    }
    if sigma == T::zero() {
        return Ok(f.clone());
    }
    let nv = f.nv();
    let r = sigma * dt / (f.dv() * f.dv());
    let explicit = scheme == DiffusionScheme::Explicit && r <= T::lit(0.5);
    let src = f.values();
    let mut out = vec![T::zero(); src.len()];
    out.par_chunks_mut(nv).enumerate().for_each(|(j, col)| {
        let c = &src[j * nv..(j + 1) * nv];
        if explicit {
            explicit_column(c, r, col);
        } else {
            implicit_column(c, r, col);
        }
    });
    Ok(f.with_values(out))
}

fn explicit_column<T: Real>(c: &[T], r: T, out: &mut [T]) {
    let n = c.len();
    let mut lower = T::zero();
    for k in 0..n {
        let upper = if k + 1 < n { c[k + 1] - c[k] } else { T::zero() };
        out[k] = c[k] + r * (upper - lower);
        lower = upper;
    }
}

/// Thomas algorithm for `(I - r Δ_N) y = c` with Neumann ends.
fn implicit_column<T: Real>(c: &[T], r: T, out: &mut [T]) {
    let n = c.len();
    let two = T::lit(2.0);
    let diag = |k: usize| {
        if k == 0 || k == n - 1 {
            T::one() + r
        } else {
            T::one() + two * r
        }
    };
    let off = -r;
    let mut cp = vec![T::zero(); n];
    let mut beta = diag(0);
    out[0] = c[0] / beta;
    for k in 1..n {
        cp[k] = off / beta;
        beta = diag(k) - off * cp[k];
        out[k] = (c[k] - off * out[k - 1]) / beta;
    }
    for k in (0..n - 1).rev() {
        let next = out[k + 1];
        out[k] -= cp[k + 1] * next;
    }
}
