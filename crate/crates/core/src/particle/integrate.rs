use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::model::KernelSpec;
use crate::particle::force::forces_raw;
use crate::particle::rng::NoiseStream;
use crate::particle::ParticleEnsemble;
use crate::scalar::Real;

/// One classical RK4 step of `dX/dt = V`, `dV/dt = F(X, V)`.
///
/// A negative `dt` integrates backwards.
pub fn step_deterministic<T: Real>(
    e: &ParticleEnsemble<T>,
    k: &KernelSpec<T>,
    dt: T,
) -> Result<ParticleEnsemble<T>> {
    let f1 = forces_raw(e.positions(), e.velocities(), e.d(), e.weight(), k);
    step_deterministic_with(e, k, dt, &f1)
}

/// RK4 step reusing already computed forces at the current state as the first stage.
pub fn step_deterministic_with<T: Real>(
    e: &ParticleEnsemble<T>,
    k: &KernelSpec<T>,
    dt: T,
    f1: &[T],
) -> Result<ParticleEnsemble<T>> {
    if !(dt.is_finite() && dt != T::zero()) {
        return Err(Error::StepSize(format!("dt must be finite and nonzero, got {dt}")));
    }
    let (d, w) = (e.d(), e.weight());
    let (x0, v0) = (e.positions(), e.velocities());
    let half = dt / T::lit(2.0);
    let axpy = |base: &[T], a: T, dir: &[T]| -> Vec<T> {
        base.par_iter().zip(dir).map(|(&b, &s)| b + a * s).collect()
    };

    let x2 = axpy(x0, half, v0);
    let v2 = axpy(v0, half, f1);
    let f2 = forces_raw(&x2, &v2, d, w, k);

    let x3 = axpy(x0, half, &v2);
    let v3 = axpy(v0, half, &f2);
    let f3 = forces_raw(&x3, &v3, d, w, k);

    let x4 = axpy(x0, dt, &v3);
    let v4 = axpy(v0, dt, &f3);
    let f4 = forces_raw(&x4, &v4, d, w, k);

    let sixth = dt / T::lit(6.0);
    let two = T::lit(2.0);
    let combine = |base: &[T], s1: &[T], s2: &[T], s3: &[T], s4: &[T]| -> Vec<T> {
        (0..base.len())
            .into_par_iter()
            .map(|i| base[i] + sixth * (s1[i] + two * s2[i] + two * s3[i] + s4[i]))
            .collect()
    };
    let x = combine(x0, v0, &v2, &v3, &v4);
    let v = combine(v0, f1, &f2, &f3, &f4);
    let next = e.with_state(x, v, e.t() + dt);
    next.check_finite()?;
    Ok(next)
}

/// Euler–Maruyama step for the noisy system:
/// `V ← V + F dt + sqrt(2σ dt) ξ`, `X ← X + V dt` (explicit, old `V`).
///
/// `ξ` for particle `i` comes from `noise` keyed on `(step, i)`.
pub fn step_stochastic<T: Real>(
    e: &ParticleEnsemble<T>,
    k: &KernelSpec<T>,
    dt: T,
    sigma: T,
    noise: &NoiseStream,
    step: u64,
) -> Result<ParticleEnsemble<T>> {
    let f = forces_raw(e.positions(), e.velocities(), e.d(), e.weight(), k);
    step_stochastic_with(e, dt, sigma, noise, step, &f)
}

pub fn step_stochastic_with<T: Real>(
    e: &ParticleEnsemble<T>,
    dt: T,
    sigma: T,
    noise: &NoiseStream,
    step: u64,
    f: &[T],
) -> Result<ParticleEnsemble<T>> {
    if !(dt > T::zero() && dt.is_finite()) {
        return Err(Error::StepSize(format!("dt must be > 0, got {dt}")));
    }
    if !(sigma >= T::zero()) {
        return Err(Error::Domain(format!("sigma must be >= 0, got {sigma}")));
    }
    let d = e.d();
    let amp = (T::lit(2.0) * sigma * dt).sqrt();
    let (x0, v0) = (e.positions(), e.velocities());
    let mut x = vec![T::zero(); x0.len()];
    let mut v = vec![T::zero(); v0.len()];
    x.par_chunks_mut(d)
        .zip(v.par_chunks_mut(d))
        .enumerate()
        .for_each(|(i, (xo, vo))| {
            let mut xi = [0.0f64; crate::model::MAX_DIM];
            if sigma > T::zero() {
                noise.normals(step, i as u64, &mut xi[..d]);
            }
            for c in 0..d {
                let idx = i * d + c;
                xo[c] = x0[idx] + v0[idx] * dt;
                vo[c] = v0[idx] + f[idx] * dt + amp * T::lit(xi[c]);
            }
        });
    let next = e.with_state(x, v, e.t() + dt);
    next.check_finite()?;
    Ok(next)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::particle::empirical_moments;

    #[test]
    fn two_particle_relaxation_matches_closed_form() {
        // Equal weights summing to one with φ ≡ 1: δ' = -δ.
        let k = KernelSpec::constant(1.0).unwrap();
        let mut e = ParticleEnsemble::from_1d(vec![0.0, 0.0], vec![1.0, -1.0], 1.0).unwrap();
        for _ in 0..1000 {
            e = step_deterministic(&e, &k, 1e-3).unwrap();
        }
        let delta = e.velocity(0)[0] - e.velocity(1)[0];
        assert!((delta - 2.0 * (-1.0f64).exp()).abs() < 1e-9);
    }

    #[test]
    fn rigid_translation() {
        let k = KernelSpec::default();
        let e = ParticleEnsemble::from_1d(vec![0.0f64, 1.0, 3.0], vec![0.5; 3], 1.0).unwrap();
        let g = step_deterministic(&e, &k, 0.1).unwrap();
        for i in 0..3 {
            assert_eq!(g.velocity(i)[0], 0.5);
            assert!((g.position(i)[0] - e.position(i)[0] - 0.05).abs() < 1e-15);
        }
    }

    #[test]
    fn time_reversal() {
        let k = KernelSpec::default();
        let e = ParticleEnsemble::from_1d(
            vec![-1.0f64, -0.2, 0.4, 1.3],
            vec![0.9, -0.3, 0.1, -1.2],
            1.0,
        )
        .unwrap();
        let fwd = step_deterministic(&e, &k, 1e-2).unwrap();
        let back = step_deterministic(&fwd, &k, -1e-2).unwrap();
        for (a, b) in back.positions().iter().zip(e.positions()) {
            assert!((a - b).abs() < 1e-10);
        }
        for (a, b) in back.velocities().iter().zip(e.velocities()) {
            assert!((a - b).abs() < 1e-10);
        }
    }

    #[test]
    fn momentum_preserved_per_step() {
        let k = KernelSpec::default();
        let n = 64;
        let pos = (0..2 * n).map(|i| (i as f64 * 0.37).sin() * 2.0).collect();
        let vel = (0..2 * n).map(|i| (i as f64 * 0.91).cos()).collect();
        let e = ParticleEnsemble::new(2, pos, vel, 1.0, 0.0).unwrap();
        let p0 = empirical_moments(&e).momentum;
        let g = step_deterministic(&e, &k, 0.05).unwrap();
        let p1 = empirical_moments(&g).momentum;
        for c in 0..2 {
            assert!((p0[c] - p1[c]).abs() < 1e-13);
        }
    }

    #[test]
    fn zero_noise_is_explicit_euler() {
        let k = KernelSpec::default();
        let e = ParticleEnsemble::from_1d(vec![-0.5, 0.1, 0.9], vec![1.0, 0.0, -0.4], 1.0).unwrap();
        let dt = 0.01;
        let g = step_stochastic(&e, &k, dt, 0.0, &NoiseStream::new(3), 0).unwrap();
        let f = crate::particle::forces(&e, &k);
        for i in 0..3 {
            let (x, v) = (e.position(i)[0], e.velocity(i)[0]);
            assert_eq!(g.velocity(i)[0], v + f[i] * dt);
            assert_eq!(g.position(i)[0], x + v * dt);
        }
    }

    #[test]
    fn blow_up_reported() {
        let k = KernelSpec::constant(1.0).unwrap();
        let e = ParticleEnsemble::from_1d(vec![0.0, 0.0], vec![1e308, -1e308], 1.0).unwrap();
        assert!(matches!(step_deterministic(&e, &k, 1.0), Err(Error::BlowUp { .. })));
    }
}
