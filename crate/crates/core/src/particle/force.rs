//! Alignment forces `F_i = Σ_j w φ(|X_i - X_j|)(V_j - V_i)` and the particle
//! dissipation `D = Σ_ij w² φ_ij |V_i - V_j|²`.

use rayon::prelude::*;

use crate::model::{KernelSpec, KernelVariant};
use crate::particle::ParticleEnsemble;
use crate::scalar::Real;

/// Force on particle `i`, summing `j` in ascending order.
pub fn pairwise_force<T: Real>(e: &ParticleEnsemble<T>, k: &KernelSpec<T>, i: usize) -> Vec<T> {
    let mut out = vec![T::zero(); e.d()];
    force_on(e.positions(), e.velocities(), e.d(), e.weight(), k, i, &mut out);
    out
}

fn force_on<T: Real>(pos: &[T], vel: &[T], d: usize, w: T, k: &KernelSpec<T>, i: usize, out: &mut [T]) {
    let n = pos.len() / d;
    out.iter_mut().for_each(|o| *o = T::zero());
    if d == 1 {
        let (xi, vi) = (pos[i], vel[i]);
        let mut acc = T::zero();
        for j in 0..n {
            if j != i {
                let dx = pos[j] - xi;
                acc += k.phi_sq(dx * dx) * (vel[j] - vi);
            }
        }
        out[0] = acc * w;
        return;
    }
    let xi = &pos[i * d..(i + 1) * d];
    let vi = &vel[i * d..(i + 1) * d];
    for j in 0..n {
        if j == i {
            continue;
        }
        let xj = &pos[j * d..(j + 1) * d];
        let vj = &vel[j * d..(j + 1) * d];
        let r2: T = xi.iter().zip(xj).map(|(a, b)| (*b - *a) * (*b - *a)).sum();
        let phi = k.phi_sq(r2);
        for c in 0..d {
            out[c] += phi * (vj[c] - vi[c]);
        }
    }
    out.iter_mut().for_each(|o| *o *= w);
}

/// All forces by the O(N²) direct sum.
pub fn forces_direct<T: Real>(e: &ParticleEnsemble<T>, k: &KernelSpec<T>) -> Vec<T> {
    forces_direct_raw(e.positions(), e.velocities(), e.d(), e.weight(), k)
}

fn forces_direct_raw<T: Real>(pos: &[T], vel: &[T], d: usize, w: T, k: &KernelSpec<T>) -> Vec<T> {
    let mut out = vec![T::zero(); pos.len()];
    out.par_chunks_mut(d)
        .enumerate()
        .for_each(|(i, o)| force_on(pos, vel, d, w, k, i, o));
    out
}

/// All forces. A constant kernel separates into `c w (S - N V_i)` with
/// `S = Σ_j V_j`, which is evaluated in O(N); other kernels use the direct sum.
pub fn forces<T: Real>(e: &ParticleEnsemble<T>, k: &KernelSpec<T>) -> Vec<T> {
    forces_raw(e.positions(), e.velocities(), e.d(), e.weight(), k)
}

pub(crate) fn forces_raw<T: Real>(pos: &[T], vel: &[T], d: usize, w: T, k: &KernelSpec<T>) -> Vec<T> {
    match k.variant() {
        KernelVariant::Disabled => vec![T::zero(); pos.len()],
        KernelVariant::Constant(c) => {
            let n = pos.len() / d;
            let mut sum = vec![T::zero(); d];
            for i in 0..n {
                for (s, &v) in sum.iter_mut().zip(&vel[i * d..(i + 1) * d]) {
                    *s += v;
                }
            }
            let nn = T::from_count(n);
            let cw = c * w;
            let mut out = vec![T::zero(); pos.len()];
            out.par_chunks_mut(d).enumerate().for_each(|(i, o)| {
                for (dim, oc) in o.iter_mut().enumerate() {
                    *oc = cw * (sum[dim] - nn * vel[i * d + dim]);
                }
            });
            out
        }
        KernelVariant::AlgebraicDecay(_) => forces_direct_raw(pos, vel, d, w, k),
    }
}

/// `D = Σ_i Σ_j w² φ(|X_i - X_j|) |V_i - V_j|²` by direct double sum.
pub fn dissipation_direct<T: Real>(e: &ParticleEnsemble<T>, k: &KernelSpec<T>) -> T {
    let n = e.len();
    let w = e.weight();
    let rows: Vec<T> = (0..n)
        .into_par_iter()
        .map(|i| {
            let (xi, vi) = (e.position(i), e.velocity(i));
            let mut s = T::zero();
            for j in 0..n {
                let (xj, vj) = (e.position(j), e.velocity(j));
                let r2: T = xi.iter().zip(xj).map(|(a, b)| (*a - *b) * (*a - *b)).sum();
                let dv2: T = vi.iter().zip(vj).map(|(a, b)| (*a - *b) * (*a - *b)).sum();
                s += k.phi_sq(r2) * dv2;
            }
            s
        })
        .collect();
    rows.into_iter().sum::<T>() * w * w
}

/// `D = -2 Σ_i w V_i · F_i`, the same quantity obtained from already computed
/// forces by symmetrising the double sum.
pub fn dissipation_from_forces<T: Real>(e: &ParticleEnsemble<T>, forces: &[T]) -> T {
    let s: T = e
        .velocities()
        .iter()
        .zip(forces)
        .map(|(&v, &f)| v * f)
        .sum();
    -T::lit(2.0) * e.weight() * s
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn single_particle_feels_nothing() {
        let e = ParticleEnsemble::from_1d(vec![0.3], vec![2.0], 1.0).unwrap();
        let k = KernelSpec::default();
        assert_eq!(pairwise_force(&e, &k, 0), vec![0.0]);
    }

    #[test]
    fn two_particles_constant_kernel() {
        let e = ParticleEnsemble::from_1d(vec![0.0, 5.0], vec![1.0, -1.0], 1.0).unwrap();
        let k = KernelSpec::constant(1.0).unwrap();
        assert_eq!(pairwise_force(&e, &k, 0), vec![-1.0]);
        assert_eq!(pairwise_force(&e, &k, 1), vec![1.0]);
    }

    #[test]
    fn equal_velocities_give_zero_force() {
        let u = [0.7, -1.1];
        let e = ParticleEnsemble::new(2, vec![0.0, 1.0, 2.0, -1.0, 0.5, 0.5], u.repeat(3), 1.0, 0.0)
            .unwrap();
        for f in forces(&e, &KernelSpec::default()) {
            assert_eq!(f, 0.0);
        }
    }

    fn scattered(n: usize, d: usize) -> ParticleEnsemble<f64> {
        let pos = (0..n * d).map(|i| ((i * 37) % 101) as f64 * 0.05 - 2.5).collect();
        let vel = (0..n * d).map(|i| ((i * 53) % 89) as f64 * 0.03 - 1.3).collect();
        ParticleEnsemble::new(d, pos, vel, 1.3, 0.0).unwrap()
    }

    #[test]
    fn constant_fast_path_matches_direct() {
        for d in [1, 2, 3] {
            let e = scattered(57, d);
            let k = KernelSpec::constant(0.6).unwrap();
            let fast = forces(&e, &k);
            let slow = forces_direct(&e, &k);
            for (a, b) in fast.iter().zip(&slow) {
                assert!((a - b).abs() < 1e-13, "{a} vs {b}");
            }
        }
    }

    #[test]
    fn pairwise_force_matches_batch() {
        let e = scattered(20, 2);
        let k = KernelSpec::default();
        let all = forces(&e, &k);
        for i in 0..20 {
            assert_eq!(pairwise_force(&e, &k, i), all[2 * i..2 * i + 2].to_vec());
        }
    }

    #[test]
    fn dissipation_routes_agree() {
        for d in [1, 2] {
            let e = scattered(40, d);
            for k in [KernelSpec::default(), KernelSpec::constant(1.0).unwrap()] {
                let a = dissipation_direct(&e, &k);
                let b = dissipation_from_forces(&e, &forces(&e, &k));
                assert!(a > 0.0);
                assert!((a - b).abs() <= 1e-12 * a, "{a} vs {b}");
            }
        }
    }
}
