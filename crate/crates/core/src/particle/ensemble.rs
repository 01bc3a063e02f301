use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::grid::PhaseGrid;
use crate::particle::rng::NoiseStream;
use crate::scalar::Real;

/// Equal-weight particles in `d` dimensions. Coordinates are stored flat,
/// particle-major: `pos[i * d + c]`.
#[derive(Clone, Debug, PartialEq)]
pub struct ParticleEnsemble<T> {
    d: usize,
    pos: Vec<T>,
    vel: Vec<T>,
    mass: T,
    t: T,
}

/// Mass, momentum, kinetic energy `Σ w |V|²` and support radius `max |V_i|`.
#[derive(Clone, Debug, PartialEq)]
pub struct Moments<T> {
    pub mass: T,
    pub momentum: Vec<T>,
    pub energy: T,
    pub support_radius: T,
}

impl<T: Real> ParticleEnsemble<T> {
    pub fn new(d: usize, pos: Vec<T>, vel: Vec<T>, mass: T, t: T) -> Result<Self> {
        if d == 0 {
            return Err(Error::Domain("dimension must be >= 1".into()));
        }
        if pos.len() != vel.len() || !pos.len().is_multiple_of(d) {
            return Err(Error::Geometry(format!(
                "position/velocity lengths {} and {} do not describe d = {d} particles",
                pos.len(),
                vel.len()
            )));
        }
        if !(mass > T::zero()) {
            return Err(Error::Domain(format!("total mass must be > 0, got {mass}")));
        }
        Ok(Self { d, pos, vel, mass, t })
    }

    /// 1-D ensemble from scalar positions and velocities.
    pub fn from_1d(pos: Vec<T>, vel: Vec<T>, mass: T) -> Result<Self> {
        Self::new(1, pos, vel, mass, T::zero())
    }

    pub(crate) fn with_state(&self, pos: Vec<T>, vel: Vec<T>, t: T) -> Self {
        Self {
            d: self.d,
            pos,
            vel,
            mass: self.mass,
            t,
        }
    }

    pub fn d(&self) -> usize {
        self.d
    }
    pub fn len(&self) -> usize {
        self.pos.len() / self.d
    }
    pub fn is_empty(&self) -> bool {
        self.pos.is_empty()
    }
    pub fn mass(&self) -> T {
        self.mass
    }
    /// `M / N`, identical for every particle.
    pub fn weight(&self) -> T {
        if self.is_empty() {
            T::zero()
        } else {
            self.mass / T::from_count(self.len())
        }
    }
    pub fn t(&self) -> T {
        self.t
    }

    pub fn set_t(&mut self, t: T) {
        self.t = t;
    }

    pub fn positions(&self) -> &[T] {
        &self.pos
    }
    pub fn velocities(&self) -> &[T] {
        &self.vel
    }
    pub fn position(&self, i: usize) -> &[T] {
        &self.pos[i * self.d..(i + 1) * self.d]
    }
    pub fn velocity(&self, i: usize) -> &[T] {
        &self.vel[i * self.d..(i + 1) * self.d]
    }

    pub(crate) fn check_finite(&self) -> Result<()> {
        if self.pos.iter().chain(&self.vel).all(|x| x.is_finite()) {
            Ok(())
        } else {
            Err(Error::BlowUp { t: self.t.as_f64() })
        }
    }

    /// Largest pairwise velocity distance.
    pub fn velocity_diameter(&self) -> T {
        let n = self.len();
        if n < 2 {
            return T::zero();
        }
        if self.d == 1 {
            let (lo, hi) = self
                .vel
                .iter()
                .fold((T::infinity(), T::neg_infinity()), |(lo, hi), &v| (lo.min(v), hi.max(v)));
            return hi - lo;
        }
        (0..n)
            .into_par_iter()
            .map(|i| {
                let vi = self.velocity(i);
                let mut m = T::zero();
                for j in i + 1..n {
                    let vj = self.velocity(j);
                    let r2: T = vi.iter().zip(vj).map(|(a, b)| (*a - *b) * (*a - *b)).sum();
                    m = m.max(r2);
                }
                m
            })
            .reduce(T::zero, T::max)
            .sqrt()
    }
}

/// Mass, momentum, energy and velocity support radius of an ensemble.
pub fn empirical_moments<T: Real>(e: &ParticleEnsemble<T>) -> Moments<T> {
    let d = e.d();
    let w = e.weight();
    let mut momentum = vec![T::zero(); d];
    let mut energy = T::zero();
    let mut radius = T::zero();
    for i in 0..e.len() {
        let v = e.velocity(i);
        let mut v2 = T::zero();
        for (p, &c) in momentum.iter_mut().zip(v) {
            *p += c;
            v2 += c * c;
        }
        energy += v2;
        radius = radius.max(v2.sqrt());
    }
    momentum.iter_mut().for_each(|p| *p *= w);
    Moments {
        mass: w * T::from_count(e.len()),
        momentum,
        energy: energy * w,
        support_radius: radius,
    }
}

/// Draws `n` particles from a grid density: a cell is chosen with probability
/// proportional to its mass, x is uniform within the cell and v sits at the
/// cell's velocity centre (so the expected moments equal the grid's midpoint moments).
pub fn sample_from_grid<T: Real>(f: &PhaseGrid<T>, n: usize, seed: u64) -> Result<ParticleEnsemble<T>> {
    f.check_nonnegative()?;
    if n == 0 {
        return Err(Error::Domain("need at least one particle".into()));
    }
    let mut cdf = Vec::with_capacity(f.values().len());
    let mut acc = 0.0f64;
    for &x in f.values() {
        acc += x.as_f64();
        cdf.push(acc);
    }
    if !(acc > 0.0) {
        return Err(Error::InvalidState("cannot sample an empty density".into()));
    }
    let stream = NoiseStream::new(seed);
    let nv = f.nv();
    let dx = f.dx();
    let (pos, vel): (Vec<T>, Vec<T>) = (0..n)
        .into_par_iter()
        .map(|i| {
            let mut u = [0.0f64; 2];
            stream.uniforms(NoiseStream::SAMPLING_STEP, i as u64, &mut u);
            let target = u[0] * acc;
            let cell = cdf.partition_point(|&c| c <= target).min(cdf.len() - 1);
            let (j, k) = (cell / nv, cell % nv);
            let x = f.x_axis().center(j) + (T::lit(u[1]) - T::lit(0.5)) * dx;
            (x, f.v_axis().center(k))
        })
        .unzip();
    ParticleEnsemble::new(1, pos, vel, f.mass(), f.t())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn moments_two_particles() {
        let e = ParticleEnsemble::from_1d(vec![0.0, 1.0], vec![1.0, -1.0], 1.0).unwrap();
        let m = empirical_moments(&e);
        assert_eq!(m.mass, 1.0);
        assert_eq!(m.momentum, vec![0.0]);
        assert_eq!(m.energy, 1.0);
        assert_eq!(m.support_radius, 1.0);
    }

    #[test]
    fn moments_at_rest_and_rigid() {
        let e = ParticleEnsemble::from_1d(vec![0.0, 1.0, 2.0], vec![0.0; 3], 1.0).unwrap();
        let m = empirical_moments(&e);
        assert_eq!((m.energy, m.support_radius), (0.0, 0.0));

        let u = [0.3, -0.4];
        let vel: Vec<f64> = (0..5).flat_map(|_| u).collect();
        let e = ParticleEnsemble::new(2, vec![0.0; 10], vel, 2.0, 0.0).unwrap();
        let m = empirical_moments(&e);
        assert!((m.momentum[0] - 0.6).abs() < 1e-15 && (m.momentum[1] + 0.8).abs() < 1e-15);
        assert!((m.support_radius - 0.5).abs() < 1e-15);
    }

    #[test]
    fn diameter() {
        let e = ParticleEnsemble::from_1d(vec![0.0; 3], vec![0.5, -2.0, 1.0], 1.0).unwrap();
        assert_eq!(e.velocity_diameter(), 3.0);
        let e = ParticleEnsemble::new(2, vec![0.0; 6], vec![0.0, 0.0, 3.0, 4.0, 1.0, 1.0], 1.0, 0.0)
            .unwrap();
        assert_eq!(e.velocity_diameter(), 5.0);
    }

    #[test]
    fn rejects_bad_shapes() {
        assert!(ParticleEnsemble::new(2, vec![0.0; 3], vec![0.0; 3], 1.0, 0.0).is_err());
        assert!(ParticleEnsemble::new(1, vec![0.0; 2], vec![0.0; 3], 1.0, 0.0).is_err());
        assert!(ParticleEnsemble::from_1d(vec![0.0], vec![0.0], 0.0).is_err());
    }

    #[test]
    fn grid_sampling_places_velocities_on_centres() {
        let mut f = PhaseGrid::zeros(8, 8, 1.0f64, 1.0);
        f.set(3, 6, 2.0);
        f.set(5, 1, 1.0);
        let e = sample_from_grid(&f, 3000, 7).unwrap();
        let v6 = f.v_axis().center(6);
        let hits = e.velocities().iter().filter(|&&v| v == v6).count();
        assert!((hits as f64 / 3000.0 - 2.0 / 3.0).abs() < 0.03);
        for i in 0..e.len() {
            let x = e.position(i)[0];
            let v = e.velocity(i)[0];
            let j = if v == v6 { 3 } else { 5 };
            assert!((x - f.x_axis().center(j)).abs() <= f.dx() / 2.0);
        }
        assert!((e.mass() - f.mass()).abs() < 1e-15);
    }
}
