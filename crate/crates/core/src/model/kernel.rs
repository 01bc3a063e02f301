//! Interaction kernels `φ(r)` with construction-time bound validation.

use crate::error::{Error, Result};
use crate::scalar::Real;

/// Range and sample count used when a kernel is constructed.
pub const VALIDATION_R_MAX: f64 = 20.0;
pub const VALIDATION_SAMPLES: usize = 20_001;
/// Slack allowed on the sampled maxima.
pub const BOUND_SLACK: f64 = 1e-12;

#[derive(Clone, Copy, Debug, PartialEq)]
pub enum KernelVariant<T> {
    /// `φ(r) = c`, `c ∈ (0, 1]`.
    Constant(T),
    /// `φ(r) = (1 + r²)^(-β/2)`, `β ≥ 0`.
    AlgebraicDecay(T),
    /// `φ ≡ 0`. Switches alignment off; only reachable through
    /// [`KernelSpec::disabled`].
    Disabled,
}

/// A validated interaction kernel.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct KernelSpec<T> {
    variant: KernelVariant<T>,
}

/// Sampled maxima of `|φ|`, `|φ'|`, `|φ''|`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct KernelBounds<T> {
    pub max_phi: T,
    pub max_dphi: T,
    pub max_ddphi: T,
}

impl<T: Real> Default for KernelSpec<T> {
    fn default() -> Self {
        Self {
            variant: KernelVariant::AlgebraicDecay(T::one()),
        }
    }
}

impl<T: Real> KernelSpec<T> {
    pub fn new(variant: KernelVariant<T>) -> Result<Self> {
        match variant {
            KernelVariant::Constant(c) => {
                if !(c > T::zero() && c <= T::one()) {
                    return Err(Error::Domain(format!(
                        "constant kernel value must lie in (0, 1], got {c}"
                    )));
                }
            }
            KernelVariant::AlgebraicDecay(beta) => {
                if !(beta >= T::zero()) || !beta.is_finite() {
                    return Err(Error::Domain(format!(
                        "decay exponent must be finite and >= 0, got {beta}"
                    )));
                }
            }
            KernelVariant::Disabled => {
                return Err(Error::Domain(
                    "the disabled kernel is a test hook; use KernelSpec::disabled".into(),
                ))
            }
        }
        let k = Self { variant };
        let bounds = validate_kernel_bounds(&k, T::lit(VALIDATION_R_MAX), VALIDATION_SAMPLES)?;
        let limit = T::one() + T::lit(BOUND_SLACK);
        for (quantity, value) in [
            ("|phi|", bounds.max_phi),
            ("|phi'|", bounds.max_dphi),
            ("|phi''|", bounds.max_ddphi),
        ] {
            if value > limit {
                return Err(Error::KernelBounds {
                    quantity,
                    value: value.as_f64(),
                });
            }
        }
        Ok(k)
    }

    pub fn constant(c: T) -> Result<Self> {
        Self::new(KernelVariant::Constant(c))
    }

    pub fn algebraic(beta: T) -> Result<Self> {
        Self::new(KernelVariant::AlgebraicDecay(beta))
    }

    /// `φ ≡ 0`: the alignment term vanishes and only transport and noise act.
    #[doc(hidden)]
    pub fn disabled() -> Self {
        Self {
            variant: KernelVariant::Disabled,
        }
    }

    pub fn variant(&self) -> KernelVariant<T> {
        self.variant
    }

    pub fn is_disabled(&self) -> bool {
        matches!(self.variant, KernelVariant::Disabled)
    }

    /// `φ(r)` without the domain check, for inner loops.
    #[inline]
    pub fn phi(&self, r: T) -> T {
        match self.variant {
            KernelVariant::Constant(c) => c,
            KernelVariant::AlgebraicDecay(beta) => {
                if beta == T::one() {
                    (T::one() + r * r).sqrt().recip()
                } else {
                    (T::one() + r * r).powf(-beta / T::lit(2.0))
                }
            }
            KernelVariant::Disabled => T::zero(),
        }
    }

    /// `φ` as a function of the squared distance; avoids a square root for
    /// the algebraic kernel.
    #[inline]
    pub fn phi_sq(&self, r2: T) -> T {
        match self.variant {
            KernelVariant::Constant(c) => c,
            KernelVariant::AlgebraicDecay(beta) => {
                if beta == T::one() {
                    (T::one() + r2).sqrt().recip()
                } else {
                    (T::one() + r2).powf(-beta / T::lit(2.0))
                }
            }
            KernelVariant::Disabled => T::zero(),
        }
    }

    #[inline]
    pub fn dphi(&self, r: T) -> T {
        match self.variant {
            KernelVariant::Constant(_) | KernelVariant::Disabled => T::zero(),
            KernelVariant::AlgebraicDecay(beta) => {
                let s = T::one() + r * r;
                -beta * r * s.powf(-beta / T::lit(2.0) - T::one())
            }
        }
    }

    #[inline]
    pub fn ddphi(&self, r: T) -> T {
        match self.variant {
            KernelVariant::Constant(_) | KernelVariant::Disabled => T::zero(),
            KernelVariant::AlgebraicDecay(beta) => {
                let s = T::one() + r * r;
                beta * s.powf(-beta / T::lit(2.0) - T::lit(2.0)) * ((beta + T::one()) * r * r - T::one())
            }
        }
    }

    /// `sup φ = φ(0)` (every variant is non-increasing).
    pub fn sup(&self) -> T {
        self.phi(T::zero())
    }
}

/// Evaluates `φ(r)`; negative or NaN `r` is a domain error.
pub fn eval_kernel<T: Real>(k: &KernelSpec<T>, r: T) -> Result<T> {
    if !(r >= T::zero()) {
        return Err(Error::Domain(format!("kernel distance must be >= 0, got {r}")));
    }
    Ok(k.phi(r))
}

/// Sampled maxima of `|φ|, |φ'|, |φ''|` over `samples` equispaced points of `[0, r_max]`.
pub fn validate_kernel_bounds<T: Real>(
    k: &KernelSpec<T>,
    r_max: T,
    samples: usize,
) -> Result<KernelBounds<T>> {
    if !(r_max > T::zero()) {
        return Err(Error::Domain(format!("r_max must be > 0, got {r_max}")));
    }
    if samples < 100 {
        return Err(Error::Domain(format!("need at least 100 samples, got {samples}")));
    }
    let step = r_max / T::from_count(samples - 1);
    let mut out = KernelBounds {
        max_phi: T::zero(),
        max_dphi: T::zero(),
        max_ddphi: T::zero(),
    };
    for i in 0..samples {
        let r = step * T::from_count(i);
        out.max_phi = out.max_phi.max(k.phi(r).abs());
        out.max_dphi = out.max_dphi.max(k.dphi(r).abs());
        out.max_ddphi = out.max_ddphi.max(k.ddphi(r).abs());
    }
    Ok(out)
}
