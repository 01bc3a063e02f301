use crate::error::{Error, Result};
use crate::scalar::Real;

/// Tail weights `ω(x,v) = (1+|v|²)(1+|x|²+|v|²)^α` and `ν(v) = 1+|v|²`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct WeightSpec<T> {
    alpha: T,
}

impl<T: Real> WeightSpec<T> {
    pub fn new(alpha: T) -> Result<Self> {
        if !(alpha > T::lit(3.0)) || !alpha.is_finite() {
            return Err(Error::validation("α > 3", format!("alpha = {alpha}")));
        }
        Ok(Self { alpha })
    }

    pub fn alpha(&self) -> T {
        self.alpha
    }

    #[inline]
    pub fn omega(&self, x2: T, v2: T) -> T {
        (T::one() + v2) * (T::one() + x2 + v2).powf(self.alpha)
    }

    #[inline]
    pub fn nu(&self, v2: T) -> T {
        T::one() + v2
    }
}

impl<T: Real> Default for WeightSpec<T> {
    fn default() -> Self {
        Self { alpha: T::lit(4.0) }
    }
}

/// Returns `(ω(x,v), ν(v))` for d-vectors `x`, `v`.
pub fn eval_weights<T: Real>(w: &WeightSpec<T>, x: &[T], v: &[T]) -> (T, T) {
    let x2: T = x.iter().map(|&c| c * c).sum();
    let v2: T = v.iter().map(|&c| c * c).sum();
    (w.omega(x2, v2), w.nu(v2))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn examples() {
        let w = WeightSpec::new(4.0f64).unwrap();
        assert_eq!(eval_weights(&w, &[0.0], &[0.0]), (1.0, 1.0));
        assert_eq!(eval_weights(&w, &[1.0], &[0.0]), (16.0, 1.0));
        assert_eq!(eval_weights(&w, &[0.0], &[1.0]), (32.0, 2.0));
    }

    #[test]
    fn alpha_must_exceed_three() {
        match WeightSpec::new(2.0f64) {
            Err(Error::Validation { constraint, .. }) => assert_eq!(constraint, "α > 3"),
            other => panic!("unexpected {other:?}"),
        }
        assert!(WeightSpec::new(3.0f64).is_err());
        assert!(WeightSpec::new(3.0001f64).is_ok());
    }

    #[test]
    fn weights_at_least_one() {
        let w = WeightSpec::new(3.5f64).unwrap();
        for &(x, v) in &[(0.3, -2.0), (-5.0, 0.1), (1e3, 1e-3)] {
            let (om, nu) = eval_weights(&w, &[x, 0.5], &[v, -0.2]);
            assert!(om >= 1.0 && nu >= 1.0);
        }
    }
}
