use crate::error::{Error, Result};
use crate::model::MAX_DIM;
use crate::scalar::Real;

/// One output time. Norm entries that the particle path cannot represent are `None`.
#[derive(Clone, Debug, PartialEq)]
pub struct Record<T> {
    pub t: T,
    pub mass: T,
    pub momentum: [T; MAX_DIM],
    pub energy: T,
    /// Instantaneous dissipation `D(t)`.
    pub dissipation_rate: T,
    /// `∫₀ᵗ D ds`, trapezoidal at the solver's step times.
    pub cumulative_dissipation: T,
    pub support_radius: T,
    pub l1: T,
    /// `‖(1+v²)^{1/2} f‖_{L¹}`.
    pub l1_v: T,
    pub l2w: Option<T>,
    /// `‖(1+v²)^{1/2} f‖_{L²(ω)}`.
    pub l2w_v: Option<T>,
    pub grad_x_l2nu: Option<T>,
    pub grad_v_l2: Option<T>,
    /// `‖(1+v²)^{1/2} ∇v f‖_{L²(ω)}`, the integrand of the noise dissipation term.
    pub grad_v_l2w_v: Option<T>,
    pub x_norm: Option<T>,
    pub w11: Option<T>,
    /// Mass in the outermost grid cells (truncation monitor).
    pub boundary_mass: Option<T>,
}

impl<T: Real> Record<T> {
    pub fn empty(t: T) -> Self {
        Self {
            t,
            mass: T::zero(),
            momentum: [T::zero(); MAX_DIM],
            energy: T::zero(),
            dissipation_rate: T::zero(),
            cumulative_dissipation: T::zero(),
            support_radius: T::zero(),
            l1: T::zero(),
            l1_v: T::zero(),
            l2w: None,
            l2w_v: None,
            grad_x_l2nu: None,
            grad_v_l2: None,
            grad_v_l2w_v: None,
            x_norm: None,
            w11: None,
            boundary_mass: None,
        }
    }

    /// `|‖f‖²_X - (‖f‖²_{L²(ω)} + ‖∇x f‖²_{L²(ν)} + ‖∇v f‖²)|` relative to `‖f‖²_X`.
    pub fn x_norm_defect(&self) -> Option<T> {
        let x = self.x_norm?;
        let sum = self.l2w? * self.l2w? + self.grad_x_l2nu? * self.grad_x_l2nu? + self.grad_v_l2? * self.grad_v_l2?;
        let x2 = x * x;
        Some(if x2 > T::zero() { (x2 - sum).abs() / x2 } else { sum })
    }
}

/// Time-ordered diagnostics records.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct DiagnosticsSeries<T> {
    records: Vec<Record<T>>,
}

impl<T: Real> DiagnosticsSeries<T> {
    pub fn new() -> Self {
        Self { records: Vec::new() }
    }

    pub fn push(&mut self, r: Record<T>) -> Result<()> {
        if let Some(last) = self.records.last() {
            if !(r.t > last.t) {
                return Err(Error::InvalidState(format!(
                    "record times must increase strictly: {} after {}",
                    r.t, last.t
                )));
            }
        }
        self.records.push(r);
        Ok(())
    }

    pub fn records(&self) -> &[Record<T>] {
        &self.records
    }

    pub fn len(&self) -> usize {
        self.records.len()
    }

    pub fn is_empty(&self) -> bool {
        self.records.is_empty()
    }

    pub fn first(&self) -> Option<&Record<T>> {
        self.records.first()
    }

    pub fn last(&self) -> Option<&Record<T>> {
        self.records.last()
    }

    pub fn times(&self) -> Vec<T> {
        self.records.iter().map(|r| r.t).collect()
    }

    pub fn column(&self, get: impl Fn(&Record<T>) -> T) -> Vec<T> {
        self.records.iter().map(get).collect()
    }
}

impl<T> FromIterator<Record<T>> for DiagnosticsSeries<T> {
    fn from_iter<I: IntoIterator<Item = Record<T>>>(iter: I) -> Self {
        Self {
            records: iter.into_iter().collect(),
        }
    }
}
