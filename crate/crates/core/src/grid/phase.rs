use crate::error::{Error, Result};
use crate::scalar::{Axis, Real};

/// Cell-averaged density on `[-Lx, Lx] × [-Lv, Lv]`, stored x-major
/// (`values[j * nv + k]` is cell `(x_j, v_k)`).
#[derive(Clone, Debug, PartialEq)]
pub struct PhaseGrid<T> {
    x: Axis<T>,
    v: Axis<T>,
    values: Vec<T>,
    t: T,
}

impl<T: Real> PhaseGrid<T> {
    pub fn zeros(nx: usize, nv: usize, lx: T, lv: T) -> Self {
        Self {
            x: Axis::new(nx, lx),
            v: Axis::new(nv, lv),
            values: vec![T::zero(); nx * nv],
            t: T::zero(),
        }
    }

    pub fn from_values(nx: usize, nv: usize, lx: T, lv: T, values: Vec<T>, t: T) -> Result<Self> {
        if nx == 0 || nv == 0 {
            return Err(Error::Geometry(format!("empty grid {nx}x{nv}")));
        }
        if values.len() != nx * nv {
            return Err(Error::Geometry(format!(
                "expected {} values for a {nx}x{nv} grid, got {}",
                nx * nv,
                values.len()
            )));
        }
        if !(lx > T::zero() && lv > T::zero()) {
            return Err(Error::Geometry(format!("extents must be positive: {lx}, {lv}")));
        }
        Ok(Self {
            x: Axis::new(nx, lx),
            v: Axis::new(nv, lv),
            values,
            t,
        })
    }

    /// Same geometry and time, new values.
    pub(crate) fn with_values(&self, values: Vec<T>) -> Self {
        debug_assert_eq!(values.len(), self.values.len());
        Self {
            x: self.x,
            v: self.v,
            values,
            t: self.t,
        }
    }

    pub fn x_axis(&self) -> &Axis<T> {
        &self.x
    }
    pub fn v_axis(&self) -> &Axis<T> {
        &self.v
    }
    pub fn nx(&self) -> usize {
        self.x.n
    }
    pub fn nv(&self) -> usize {
        self.v.n
    }
    pub fn lx(&self) -> T {
        self.x.half_len
    }
    pub fn lv(&self) -> T {
        self.v.half_len
    }
    pub fn dx(&self) -> T {
        self.x.spacing()
    }
    pub fn dv(&self) -> T {
        self.v.spacing()
    }
    pub fn cell_area(&self) -> T {
        self.dx() * self.dv()
    }
    pub fn t(&self) -> T {
        self.t
    }
    pub fn set_t(&mut self, t: T) {
        self.t = t;
    }
    pub fn values(&self) -> &[T] {
        &self.values
    }
    pub fn values_mut(&mut self) -> &mut [T] {
        &mut self.values
    }
    pub fn into_values(self) -> Vec<T> {
        self.values
    }

    #[inline]
    pub fn get(&self, j: usize, k: usize) -> T {
        self.values[j * self.v.n + k]
    }

    #[inline]
    pub fn set(&mut self, j: usize, k: usize, value: T) {
        let nv = self.v.n;
        self.values[j * nv + k] = value;
    }

    /// The v-column at spatial cell `j`.
    pub fn column(&self, j: usize) -> &[T] {
        let nv = self.v.n;
        &self.values[j * nv..(j + 1) * nv]
    }

    pub fn same_geometry(&self, other: &Self) -> bool {
        self.x == other.x && self.v == other.v
    }

    /// `Σ f Δx Δv`.
    pub fn mass(&self) -> T {
        self.values.iter().copied().sum::<T>() * self.cell_area()
    }

    pub fn min_value(&self) -> T {
        self.values.iter().copied().fold(T::infinity(), T::min)
    }

    pub fn max_value(&self) -> T {
        self.values.iter().copied().fold(T::neg_infinity(), T::max)
    }

    pub fn scale(&mut self, c: T) {
        self.values.iter_mut().for_each(|f| *f *= c);
    }

    pub(crate) fn check_nonnegative(&self) -> Result<()> {
        if let Some(pos) = self.values.iter().position(|&f| !(f >= T::zero())) {
            let (j, k) = (pos / self.v.n, pos % self.v.n);
            return Err(Error::InvalidState(format!(
                "density cell ({j}, {k}) = {} is negative or NaN",
                self.values[pos]
            )));
        }
        Ok(())
    }

    /// Mass carried by the outermost ring of cells.
    pub fn boundary_mass(&self) -> T {
        let (nx, nv) = (self.nx(), self.nv());
        let mut s = T::zero();
        for j in 0..nx {
            for k in 0..nv {
                if j == 0 || j == nx - 1 || k == 0 || k == nv - 1 {
                    s += self.get(j, k).abs();
                }
            }
        }
        s * self.cell_area()
    }

    /// Density integrated over x: `ρ(v_k) = Σ_j f_jk Δx`.
    pub fn v_marginal(&self) -> Vec<T> {
        let dx = self.dx();
        let mut out = vec![T::zero(); self.nv()];
        for j in 0..self.nx() {
            for (o, &f) in out.iter_mut().zip(self.column(j)) {
                *o += f;
            }
        }
        out.iter_mut().for_each(|o| *o *= dx);
        out
    }
}
