use crate::error::{Error, Result};
use crate::grid::PhaseGrid;
use crate::scalar::Real;

/// Bilinear interpolation of cell values at `(x, v)`.
///
/// Between the outermost cell centre and the domain edge the nearest
/// centre's value is used along that axis.
pub fn sample_density<T: Real>(f: &PhaseGrid<T>, x: T, v: T) -> Result<T> {
    if !(x.abs() <= f.lx() && v.abs() <= f.lv()) {
        return Err(Error::Domain(format!(
            "probe ({x}, {v}) outside [-{}, {}] x [-{}, {}]",
            f.lx(),
            f.lx(),
            f.lv(),
            f.lv()
        )));
    }
    let (j, tx) = locate(f.nx(), f.lx(), f.dx(), x);
    let (k, tv) = locate(f.nv(), f.lv(), f.dv(), v);
    let j1 = (j + 1).min(f.nx() - 1);
    let k1 = (k + 1).min(f.nv() - 1);
    let one = T::one();
    Ok(f.get(j, k) * (one - tx) * (one - tv)
        + f.get(j1, k) * tx * (one - tv)
        + f.get(j, k1) * (one - tx) * tv
        + f.get(j1, k1) * tx * tv)
}

/// Lower neighbouring centre index and fractional offset, clamped to the centre hull.
fn locate<T: Real>(n: usize, half: T, h: T, x: T) -> (usize, T) {
    let s = (x + half) / h - T::lit(0.5);
    if s <= T::zero() || n == 1 {
        return (0, T::zero());
    }
    let last = T::from_count(n - 1);
    if s >= last {
        return (n - 1, T::zero());
    }
    let i = s.floor().to_usize().unwrap_or(0).min(n - 2);
    (i, s - T::from_count(i))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::{init_grid, Profile};
    use crate::model::SimParams;

    #[test]
    fn centre_probe_returns_cell_value() {
        let mut f = PhaseGrid::zeros(6, 7, 1.5, 2.0);
        f.set(2, 5, 3.25);
        let x = f.x_axis().center(2);
        let v = f.v_axis().center(5);
        assert_eq!(sample_density(&f, x, v).unwrap(), 3.25);
    }

    #[test]
    fn linear_profiles_reproduced() {
        let mut f = PhaseGrid::<f64>::zeros(10, 12, 2.0, 3.0);
        for j in 0..10 {
            for k in 0..12 {
                let (x, v) = (f.x_axis().center(j), f.v_axis().center(k));
                f.set(j, k, 1.0 + 0.3 * x - 0.7 * v + 0.05 * x * v);
            }
        }
        for &(x, v) in &[(0.11, -1.3), (-1.5, 2.2), (0.0, 0.0), (1.7, -2.6)] {
            let got = sample_density(&f, x, v).unwrap();
            assert!((got - (1.0 + 0.3 * x - 0.7 * v + 0.05 * x * v)).abs() < 1e-13);
        }
    }

    #[test]
    fn outside_support_and_domain() {
        let sp = SimParams {
            nx: 32,
            nv: 32,
            lx: 3.0,
            lv: 3.0,
            ..Default::default()
        };
        let f = init_grid(&Profile::BumpCompact { r0: 1.0, x_width: 1.0 }, &sp).unwrap();
        assert_eq!(sample_density(&f, 0.0, 2.5).unwrap(), 0.0);
        assert!(sample_density(&f, 3.5, 0.0).is_err());
    }
}
