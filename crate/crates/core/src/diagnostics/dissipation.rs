use crate::error::Result;
use crate::grid::PhaseGrid;
use crate::model::fields::{column_moments, kernel_moments};
use crate::model::{FieldMethod, KernelSpec};
use crate::scalar::Real;

/// `D = ∫∫ φ(|x-y|) f(y,v*) f(x,v) (v* - v)² dy dv* dx dv` on the grid.
///
/// Reduced to column moments: `D = Σ_j Δx (a_j e_j - 2 b_j m_j + q_j ρ_j)`
/// with `q = φ * e`. Rounding can push a vanishing result below zero; it is
/// clamped at zero.
pub fn dissipation_rate<T: Real>(f: &PhaseGrid<T>, k: &KernelSpec<T>) -> Result<T> {
    let km = kernel_moments(f, k, FieldMethod::Direct, true)?;
    if k.is_disabled() {
        return Ok(T::zero());
    }
    let cm = column_moments(f);
    let two = T::lit(2.0);
    let mut s = T::zero();
    for j in 0..f.nx() {
        s += km.a[j] * cm.energy[j] - two * km.b[j] * cm.mom[j] + km.q[j] * cm.rho[j];
    }
    Ok((s * f.dx()).max(T::zero()))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn monokinetic_and_empty() {
        let k = KernelSpec::default();
        let mut f = PhaseGrid::zeros(8, 8, 2.0, 2.0);
        assert_eq!(dissipation_rate(&f, &k).unwrap(), 0.0);
        for j in 1..6 {
            f.set(j, 5, 1.0 + j as f64);
        }
        let d = dissipation_rate(&f, &k).unwrap();
        assert!(d.abs() < 1e-14);
    }

    #[test]
    fn two_opposed_cells() {
        // equal mass m at one x, velocities ±v: D = 2 m² (2v)²
        let mut f = PhaseGrid::zeros(4, 4, 1.0f64, 2.0);
        let m = 0.5;
        let area = f.cell_area();
        f.set(1, 0, m / area);
        f.set(1, 3, m / area);
        let v = f.v_axis().center(3);
        let d = dissipation_rate(&f, &KernelSpec::constant(1.0).unwrap()).unwrap();
        assert!((d - 2.0 * m * m * 4.0 * v * v).abs() < 1e-13);
    }
}
