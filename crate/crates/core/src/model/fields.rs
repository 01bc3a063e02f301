//! Alignment fields `a(x) = ∫φ f`, `b(x) = ∫φ f v*` on the spatial grid, and
//! the operator `L[f](x, v) = b(x) - a(x) v` built from them.

use rayon::prelude::*;
use rustfft::num_complex::Complex;
use rustfft::FftPlanner;

use crate::error::{Error, Result};
use crate::grid::PhaseGrid;
use crate::model::kernel::KernelSpec;
use crate::scalar::{Axis, Real};

/// How the spatial convolution with `φ` is evaluated.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum FieldMethod {
    /// O(Nx²) sum with a fixed summation order; the reference path.
    #[default]
    Direct,
    /// Circulant embedding and FFT, O(Nx log Nx).
    Fft,
}

/// `a` and `b` sampled at the spatial cell centres (d = 1).
#[derive(Clone, Debug, PartialEq)]
pub struct FieldPair<T> {
    pub axis: Axis<T>,
    pub a: Vec<T>,
    pub b: Vec<T>,
}

impl<T: Real> FieldPair<T> {
    /// Uniform fields over `axis`; handy for tests and closed-form checks.
    pub fn uniform(axis: Axis<T>, a: T, b: T) -> Self {
        Self {
            axis,
            a: vec![a; axis.n],
            b: vec![b; axis.n],
        }
    }

    /// Linear interpolation of `(a, b)` between sample points.
    pub fn sample(&self, x: T) -> Result<(T, T)> {
        let n = self.axis.n;
        let lo = self.axis.center(0);
        let hi = self.axis.center(n - 1);
        if !(x >= lo && x <= hi) {
            return Err(Error::Extrapolation {
                x: x.as_f64(),
                lo: lo.as_f64(),
                hi: hi.as_f64(),
            });
        }
        if n == 1 {
            return Ok((self.a[0], self.b[0]));
        }
        let s = (x - lo) / self.axis.spacing();
        let i = s.floor().to_usize().unwrap_or(0).min(n - 2);
        let th = s - T::from_count(i);
        let a = self.a[i] + (self.a[i + 1] - self.a[i]) * th;
        let b = self.b[i] + (self.b[i + 1] - self.b[i]) * th;
        Ok((a, b))
    }

    pub fn len(&self) -> usize {
        self.a.len()
    }

    pub fn is_empty(&self) -> bool {
        self.a.is_empty()
    }
}

/// `L[f](x, v) = b(x) - a(x) v`.
pub fn eval_l<T: Real>(fp: &FieldPair<T>, x: T, v: T) -> Result<T> {
    let (a, b) = fp.sample(x)?;
    Ok(b - a * v)
}

/// Velocity moments of each spatial column: `ρ_j`, `m_j`, `e_j`
/// (`∫f dv`, `∫f v dv`, `∫f v² dv`).
///
/// Mirrored cells are summed in pairs, so a column that is even in v has
/// `m_j == 0` exactly.
#[derive(Clone, Debug)]
pub(crate) struct ColumnMoments<T> {
    pub rho: Vec<T>,
    pub mom: Vec<T>,
    pub energy: Vec<T>,
}

pub(crate) fn column_moments<T: Real>(f: &PhaseGrid<T>) -> ColumnMoments<T> {
    let nv = f.nv();
    let vs = f.v_axis().centers();
    let dv = f.dv();
    let cols: Vec<(T, T, T)> = (0..f.nx())
        .into_par_iter()
        .map(|j| {
            let c = f.column(j);
            let (mut r, mut m, mut e) = (T::zero(), T::zero(), T::zero());
            for k in 0..nv / 2 {
                let q = nv - 1 - k;
                r += c[k] + c[q];
                m += c[k] * vs[k] + c[q] * vs[q];
                e += c[k] * vs[k] * vs[k] + c[q] * vs[q] * vs[q];
            }
            if nv % 2 == 1 {
                let k = nv / 2;
                r += c[k];
                m += c[k] * vs[k];
                e += c[k] * vs[k] * vs[k];
            }
            (r * dv, m * dv, e * dv)
        })
        .collect();
    ColumnMoments {
        rho: cols.iter().map(|c| c.0).collect(),
        mom: cols.iter().map(|c| c.1).collect(),
        energy: cols.iter().map(|c| c.2).collect(),
    }
}

/// `φ(m Δx)` for offsets `m = 0..n`.
fn kernel_table<T: Real>(axis: &Axis<T>, k: &KernelSpec<T>) -> Vec<T> {
    let dx = axis.spacing();
    (0..axis.n).map(|m| k.phi(T::from_count(m) * dx)).collect()
}

/// `out_i = Σ_j φ(|x_i - x_j|) g_j Δx`, ascending `j` for every `i`.
pub(crate) fn convolve_direct<T: Real>(axis: &Axis<T>, k: &KernelSpec<T>, g: &[T]) -> Vec<T> {
    let tab = kernel_table(axis, k);
    let dx = axis.spacing();
    let n = axis.n;
    (0..n)
        .into_par_iter()
        .map(|i| {
            let mut s = T::zero();
            for (j, &gj) in g.iter().enumerate() {
                s += tab[i.abs_diff(j)] * gj;
            }
            s * dx
        })
        .collect()
}

/// Same sums as [`convolve_direct`] for several inputs, via FFT.
pub(crate) fn convolve_fft<T: Real>(
    axis: &Axis<T>,
    k: &KernelSpec<T>,
    inputs: &[&[T]],
) -> Vec<Vec<T>> {
    let n = axis.n;
    let len = 2 * n;
    let tab = kernel_table(axis, k);
    let mut planner = FftPlanner::<T>::new();
    let fwd = planner.plan_fft_forward(len);
    let inv = planner.plan_fft_inverse(len);

    let mut kernel = vec![Complex::new(T::zero(), T::zero()); len];
    for m in 0..n {
        kernel[m].re = tab[m];
        if m > 0 {
            kernel[len - m].re = tab[m];
        }
    }
    fwd.process(&mut kernel);

    let scale = axis.spacing() / T::from_count(len);
    inputs
        .iter()
        .map(|g| {
            let mut buf = vec![Complex::new(T::zero(), T::zero()); len];
            for (b, &x) in buf.iter_mut().zip(g.iter()) {
                b.re = x;
            }
            fwd.process(&mut buf);
            for (b, kh) in buf.iter_mut().zip(&kernel) {
                *b = *b * *kh;
            }
            inv.process(&mut buf);
            buf[..n].iter().map(|c| c.re * scale).collect()
        })
        .collect()
}

/// `a`, `b` and `q = ∫φ f |v*|²` at every spatial cell.
#[derive(Clone, Debug)]
pub(crate) struct KernelMoments<T> {
    pub a: Vec<T>,
    pub b: Vec<T>,
    pub q: Vec<T>,
}

pub(crate) fn kernel_moments<T: Real>(
    f: &PhaseGrid<T>,
    k: &KernelSpec<T>,
    method: FieldMethod,
    with_energy: bool,
) -> Result<KernelMoments<T>> {
    f.check_nonnegative()?;
    let cm = column_moments(f);
    let axis = f.x_axis();
    if k.is_disabled() {
        let z = vec![T::zero(); axis.n];
        return Ok(KernelMoments {
            a: z.clone(),
            b: z.clone(),
            q: z,
        });
    }
    let (a, b, q) = match method {
        FieldMethod::Direct => {
            let q = if with_energy {
                convolve_direct(axis, k, &cm.energy)
            } else {
                Vec::new()
            };
            (
                convolve_direct(axis, k, &cm.rho),
                convolve_direct(axis, k, &cm.mom),
                q,
            )
        }
        FieldMethod::Fft => {
            let mut inputs: Vec<&[T]> = vec![&cm.rho, &cm.mom];
            if with_energy {
                inputs.push(&cm.energy);
            }
            let mut out = convolve_fft(axis, k, &inputs).into_iter();
            let a = out.next().unwrap();
            let b = out.next().unwrap();
            (a, b, out.next().unwrap_or_default())
        }
    };
    Ok(KernelMoments { a, b, q })
}

/// Midpoint-rule alignment fields of a grid density (direct convolution).
pub fn alignment_field_grid<T: Real>(f: &PhaseGrid<T>, k: &KernelSpec<T>) -> Result<FieldPair<T>> {
    alignment_field_grid_with(f, k, FieldMethod::Direct)
}

pub fn alignment_field_grid_with<T: Real>(
    f: &PhaseGrid<T>,
    k: &KernelSpec<T>,
    method: FieldMethod,
) -> Result<FieldPair<T>> {
    let km = kernel_moments(f, k, method, false)?;
    Ok(FieldPair {
        axis: *f.x_axis(),
        a: km.a,
        b: km.b,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn grid(nx: usize, nv: usize) -> PhaseGrid<f64> {
        PhaseGrid::zeros(nx, nv, 2.0, 3.0)
    }

    #[test]
    fn zero_density_gives_zero_fields() {
        let k = KernelSpec::default();
        let fp = alignment_field_grid(&grid(8, 8), &k).unwrap();
        assert!(fp.a.iter().chain(&fp.b).all(|&x| x == 0.0));
    }

    #[test]
    fn point_mass() {
        let mut f = grid(16, 12);
        let (j0, k0) = (5, 9);
        let m = 0.7;
        f.set(j0, k0, m / f.cell_area());
        let k = KernelSpec::default();
        let fp = alignment_field_grid(&f, &k).unwrap();
        let y0 = f.x_axis().center(j0);
        let w0 = f.v_axis().center(k0);
        for i in 0..16 {
            let phi = k.phi((f.x_axis().center(i) - y0).abs());
            assert!((fp.a[i] - m * phi).abs() < 1e-13);
            assert!((fp.b[i] - m * phi * w0).abs() < 1e-13);
        }
    }

    #[test]
    fn even_columns_have_exactly_zero_b() {
        let mut f = grid(10, 9);
        for j in 0..10 {
            for k in 0..9 {
                let v = f.v_axis().center(k);
                f.set(j, k, (1.0 + j as f64) * (-v * v).exp() + 0.1 * v.abs());
            }
        }
        let fp = alignment_field_grid(&f, &KernelSpec::default()).unwrap();
        assert!(fp.b.iter().all(|&b| b == 0.0));
    }

    #[test]
    fn negative_density_rejected() {
        let mut f = grid(4, 4);
        f.set(1, 1, -1e-3);
        assert!(matches!(
            alignment_field_grid(&f, &KernelSpec::default()),
            Err(Error::InvalidState(_))
        ));
    }

    #[test]
    fn eval_l_examples() {
        let ax = Axis::new(8, 1.0f64);
        assert_eq!(eval_l(&FieldPair::uniform(ax, 1.0, 0.0), 0.0, 2.0).unwrap(), -2.0);
        assert_eq!(eval_l(&FieldPair::uniform(ax, 0.0, 0.0), 0.3, -7.0).unwrap(), 0.0);
        assert_eq!(eval_l(&FieldPair::uniform(ax, 0.5, 1.0), 0.0, 2.0).unwrap(), 0.0);
        assert!(matches!(
            eval_l(&FieldPair::uniform(ax, 0.5, 1.0), 0.99, 2.0),
            Err(Error::Extrapolation { .. })
        ));
    }

    #[test]
    fn interpolation_is_linear() {
        let ax = Axis::new(5, 2.0f64);
        let fp = FieldPair {
            axis: ax,
            a: ax.centers().iter().map(|x| 1.0 + 0.5 * x).collect(),
            b: ax.centers().iter().map(|x| -3.0 * x).collect(),
        };
        for x in [-1.6, -0.77, 0.0, 1.1, 1.6] {
            let (a, b) = fp.sample(x).unwrap();
            assert!((a - (1.0 + 0.5 * x)).abs() < 1e-14);
            assert!((b + 3.0 * x).abs() < 1e-14);
        }
    }

    #[test]
    fn fft_matches_direct() {
        let mut f = grid(37, 16);
        for j in 0..37 {
            for k in 0..16 {
                f.set(j, k, ((j * 7 + k * 3) % 11) as f64 * 0.1);
            }
        }
        let k = KernelSpec::algebraic(0.8).unwrap();
        let d = alignment_field_grid_with(&f, &k, FieldMethod::Direct).unwrap();
        let s = alignment_field_grid_with(&f, &k, FieldMethod::Fft).unwrap();
        let scale = d.a.iter().fold(0.0f64, |m, x| m.max(x.abs()));
        for i in 0..37 {
            assert!((d.a[i] - s.a[i]).abs() <= 1e-12 * scale);
            assert!((d.b[i] - s.b[i]).abs() <= 1e-12 * scale);
        }
    }
}
