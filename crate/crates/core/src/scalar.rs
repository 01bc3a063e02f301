//! Scalar abstraction shared by every solver.

use std::fmt::{Debug, Display};
use std::iter::Sum;
use std::ops::{AddAssign, DivAssign, MulAssign, SubAssign};

use num_traits::{Float, FloatConst, FromPrimitive, ToPrimitive};
use rustfft::FftNum;

/// Floating point type the solvers are generic over (`f32` or `f64`).
pub trait Real:
    Float
    + FloatConst
    + FromPrimitive
    + ToPrimitive
    + FftNum
    + Sum
    + AddAssign
    + SubAssign
    + MulAssign
    + DivAssign
    + Default
    + Debug
    + Display
    + Send
    + Sync
    + 'static
{
    /// Converts an `f64` literal. Never fails for the implemented types.
    #[inline]
    fn lit(x: f64) -> Self {
        Self::from_f64(x).expect("f64 literal representable")
    }

    /// Converts a count.
    #[inline]
    fn from_count(n: usize) -> Self {
        Self::from_usize(n).expect("count representable")
    }

    #[inline]
    fn as_f64(self) -> f64 {
        self.to_f64().expect("finite conversion to f64")
    }
}

impl Real for f32 {}
impl Real for f64 {}

/// Cell-centred uniform axis on `[-half_len, half_len]` with `n` cells.
///
/// Centres are computed as `(2i + 1 - n) * h / 2`, so mirrored centres are
/// exact negatives of each other.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Axis<T> {
    pub n: usize,
    pub half_len: T,
}

impl<T: Real> Axis<T> {
    pub fn new(n: usize, half_len: T) -> Self {
        Self { n, half_len }
    }

    #[inline]
    pub fn spacing(&self) -> T {
        (self.half_len + self.half_len) / T::from_count(self.n)
    }

    #[inline]
    pub fn center(&self, i: usize) -> T {
        let twice = 2 * i as i64 + 1 - self.n as i64;
        T::from_i64(twice).unwrap() * (self.spacing() / T::lit(2.0))
    }

    /// Face `i` for `i` in `0..=n`; face 0 is the left boundary.
    #[inline]
    pub fn face(&self, i: usize) -> T {
        let twice = 2 * i as i64 - self.n as i64;
        T::from_i64(twice).unwrap() * (self.spacing() / T::lit(2.0))
    }

    pub fn centers(&self) -> Vec<T> {
        (0..self.n).map(|i| self.center(i)).collect()
    }

    /// Index of the cell containing `x`, or `None` outside the axis.
    pub fn cell_of(&self, x: T) -> Option<usize> {
        if !(x >= -self.half_len && x <= self.half_len) {
            return None;
        }
        let idx = ((x + self.half_len) / self.spacing()).floor().to_usize()?;
        Some(idx.min(self.n - 1))
    }
}
