//! Characteristics of the noiseless equation, `dX/dt = V`,
//! `dV/dt = b(t, X) - a(t, X) V`, along which the density obeys
//! `f(t, X, V) = f0(x0, v0) exp(d ∫ a)`.

use crate::error::{Error, Result};
use crate::model::FieldPair;
use crate::scalar::Real;

/// Time-dependent alignment fields `(a, b)` in `d` dimensions.
pub trait FieldProvider<T> {
    fn dim(&self) -> usize;
    /// Returns `a(t, x)` and writes `b(t, x)` into `b`.
    fn eval(&self, t: T, x: &[T], b: &mut [T]) -> Result<T>;
}

/// Spatially and temporally constant fields.
#[derive(Clone, Debug)]
pub struct ConstantFields<T> {
    pub a: T,
    pub b: Vec<T>,
}

impl<T: Real> FieldProvider<T> for ConstantFields<T> {
    fn dim(&self) -> usize {
        self.b.len()
    }
    fn eval(&self, _t: T, _x: &[T], b: &mut [T]) -> Result<T> {
        b.copy_from_slice(&self.b);
        Ok(self.a)
    }
}

/// Fields recorded from a grid run (d = 1), linearly interpolated in time and space.
#[derive(Clone, Debug, Default)]
pub struct FieldHistory<T> {
    times: Vec<T>,
    fields: Vec<FieldPair<T>>,
}

impl<T: Real> FieldHistory<T> {
    pub fn new() -> Self {
        Self {
            times: Vec::new(),
            fields: Vec::new(),
        }
    }

    /// Appends a record; times must increase strictly.
    pub fn push(&mut self, t: T, fields: FieldPair<T>) -> Result<()> {
        if let Some(&last) = self.times.last() {
            if !(t > last) {
                return Err(Error::Domain(format!("field times must increase: {t} after {last}")));
            }
        }
        self.times.push(t);
        self.fields.push(fields);
        Ok(())
    }

    pub fn len(&self) -> usize {
        self.times.len()
    }

    pub fn is_empty(&self) -> bool {
        self.times.is_empty()
    }
}

impl<T: Real> FieldProvider<T> for FieldHistory<T> {
    fn dim(&self) -> usize {
        1
    }

    fn eval(&self, t: T, x: &[T], b: &mut [T]) -> Result<T> {
        let n = self.times.len();
        if n == 0 {
            return Err(Error::InvalidState("empty field history".into()));
        }
        let (t0, t1) = (self.times[0], self.times[n - 1]);
        let slack = T::lit(1e-9) * (t1 - t0).abs().max(T::one());
        if !(t >= t0 - slack && t <= t1 + slack) {
            return Err(Error::Extrapolation {
                x: t.as_f64(),
                lo: t0.as_f64(),
                hi: t1.as_f64(),
            });
        }
        if n == 1 {
            let (a, bb) = self.fields[0].sample(x[0])?;
            b[0] = bb;
            return Ok(a);
        }
        let i = self.times.partition_point(|&s| s <= t).clamp(1, n - 1) - 1;
        let th = ((t - self.times[i]) / (self.times[i + 1] - self.times[i]))
            .max(T::zero())
            .min(T::one());
        let (a0, b0) = self.fields[i].sample(x[0])?;
        let (a1, b1) = self.fields[i + 1].sample(x[0])?;
        b[0] = b0 + (b1 - b0) * th;
        Ok(a0 + (a1 - a0) * th)
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct CharacteristicState<T> {
    pub x: Vec<T>,
    pub v: Vec<T>,
    /// `d ∫₀ᵗ a(τ, X(τ)) dτ`.
    pub log_j: T,
    pub t: T,
    /// `V(t)` from `V₀ e^{-A} + e^{-A} ∫₀ᵗ b e^{A(τ)} dτ`, using the
    /// quadratures accumulated alongside the ODE.
    pub v_closed_form: Vec<T>,
}

/// Integrates the characteristic from `(x0, v0)` to `t_final` with RK4.
///
/// The state is augmented with `A = ∫a` and `B = ∫ b e^{A}` so the explicit
/// velocity formula can be evaluated from the same run.
pub fn solve_characteristic<T: Real, F: FieldProvider<T>>(
    x0: &[T],
    v0: &[T],
    fields: &F,
    t_final: T,
    dt: T,
) -> Result<CharacteristicState<T>> {
    let d = x0.len();
    if v0.len() != d || fields.dim() != d {
        return Err(Error::Geometry(format!(
            "dimension mismatch: x0 {d}, v0 {}, fields {}",
            v0.len(),
            fields.dim()
        )));
    }
    if !(dt > T::zero()) || !(t_final >= T::zero()) {
        return Err(Error::StepSize(format!("need dt > 0 and T >= 0, got {dt}, {t_final}")));
    }
    let steps = (t_final / dt).ceil().to_usize().unwrap_or(0);
    let h = if steps > 0 { t_final / T::from_count(steps) } else { T::zero() };

    // layout: [X (d), V (d), A, B (d)]
    let len = 3 * d + 1;
    let mut y = vec![T::zero(); len];
    y[..d].copy_from_slice(x0);
    y[d..2 * d].copy_from_slice(v0);

    let mut bbuf = vec![T::zero(); d];
    let mut rhs = |t: T, y: &[T], out: &mut [T]| -> Result<()> {
        let a = fields.eval(t, &y[..d], &mut bbuf)?;
        let ea = y[2 * d].exp();
        for c in 0..d {
            out[c] = y[d + c];
            out[d + c] = bbuf[c] - a * y[d + c];
            out[2 * d + 1 + c] = bbuf[c] * ea;
        }
        out[2 * d] = a;
        Ok(())
    };

    let mut k1 = vec![T::zero(); len];
    let mut k2 = vec![T::zero(); len];
    let mut k3 = vec![T::zero(); len];
    let mut k4 = vec![T::zero(); len];
    let mut tmp = vec![T::zero(); len];
    let two = T::lit(2.0);
    let mut t = T::zero();
    for _ in 0..steps {
        rhs(t, &y, &mut k1)?;
        for i in 0..len {
            tmp[i] = y[i] + h / two * k1[i];
        }
        rhs(t + h / two, &tmp, &mut k2)?;
        for i in 0..len {
            tmp[i] = y[i] + h / two * k2[i];
        }
        rhs(t + h / two, &tmp, &mut k3)?;
        for i in 0..len {
            tmp[i] = y[i] + h * k3[i];
        }
        rhs(t + h, &tmp, &mut k4)?;
        for i in 0..len {
            y[i] += h / T::lit(6.0) * (k1[i] + two * k2[i] + two * k3[i] + k4[i]);
        }
        t += h;
    }

    let a_int = y[2 * d];
    let decay = (-a_int).exp();
    let v_closed_form = (0..d).map(|c| decay * (v0[c] + y[2 * d + 1 + c])).collect();
    Ok(CharacteristicState {
        x: y[..d].to_vec(),
        v: y[d..2 * d].to_vec(),
        log_j: T::from_count(d) * a_int,
        t: t_final,
        v_closed_form,
    })
}

/// `f0 · exp(logJ)`: the density carried to the end of the characteristic.
pub fn density_along_characteristic<T: Real>(f0_value: T, cs: &CharacteristicState<T>) -> T {
    debug_assert!(f0_value >= T::zero());
    f0_value * cs.log_j.exp()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn constant_field_closed_form() {
        let fields = ConstantFields { a: 1.0, b: vec![1.0] };
        let cs = solve_characteristic(&[0.0], &[0.0], &fields, 1.0, 1e-3).unwrap();
        let exact = 1.0 - (-1.0f64).exp();
        assert!((cs.v[0] - exact).abs() < 1e-12);
        assert!((cs.v_closed_form[0] - exact).abs() < 1e-12);
        assert!((cs.log_j - 1.0).abs() < 1e-14);
    }

    #[test]
    fn free_transport() {
        let fields = ConstantFields {
            a: 0.0,
            b: vec![0.0, 0.0],
        };
        let cs = solve_characteristic(&[1.0f64, -2.0], &[0.5, 0.25], &fields, 2.0, 0.01).unwrap();
        assert_eq!(cs.v, vec![0.5, 0.25]);
        assert!((cs.x[0] - 2.0).abs() < 1e-13 && (cs.x[1] + 1.5).abs() < 1e-13);
        assert_eq!(cs.log_j, 0.0);
    }

    #[test]
    fn log_j_scales_with_dimension() {
        let fields = ConstantFields {
            a: 1.0,
            b: vec![0.0; 3],
        };
        let cs = solve_characteristic(&[0.0f64; 3], &[1.0, 0.0, 0.0], &fields, 1.0, 1e-2).unwrap();
        assert!((cs.log_j - 3.0).abs() < 1e-13);
    }

    #[test]
    fn density_formula() {
        let mut cs = CharacteristicState {
            x: vec![0.0],
            v: vec![0.0],
            log_j: 0.0,
            t: 0.0,
            v_closed_form: vec![0.0],
        };
        assert_eq!(density_along_characteristic(0.0, &cs), 0.0);
        assert_eq!(density_along_characteristic(0.3, &cs), 0.3);
        cs.log_j = 2f64.ln();
        assert!((density_along_characteristic(0.5, &cs) - 1.0).abs() < 1e-15);
    }

    #[test]
    fn history_interpolates_in_time() {
        use crate::scalar::Axis;
        let ax = Axis::new(8, 2.0f64);
        let mut h = FieldHistory::new();
        h.push(0.0, FieldPair::uniform(ax, 1.0, 0.0)).unwrap();
        h.push(1.0, FieldPair::uniform(ax, 3.0, 2.0)).unwrap();
        assert!(h.push(1.0, FieldPair::uniform(ax, 3.0, 2.0)).is_err());
        let mut b = [0.0];
        let a = h.eval(0.25, &[0.1], &mut b).unwrap();
        assert!((a - 1.5).abs() < 1e-15 && (b[0] - 0.5).abs() < 1e-15);
        assert!(h.eval(1.5, &[0.0], &mut b).is_err());
        assert!(h.eval(0.5, &[1.9], &mut b).is_err());
    }
}
