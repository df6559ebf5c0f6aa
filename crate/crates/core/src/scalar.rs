//! The component type of a [`PointTensor`](crate::tensor::PointTensor).
//!
//! Tensor algebra is written once over [`Scalar`] and reused for plain reals
//! and for truncated jets, so that every bilinear operation automatically
//! obeys the product rule when its inputs carry derivatives.

use std::fmt::Debug;
use std::ops::{Add, Div, Mul, Neg, Sub};

pub trait Scalar:
    Clone
    + Debug
    + Send
    + Sync
    + 'static
    + Add<Output = Self>
    + Sub<Output = Self>
    + Mul<Output = Self>
    + Div<Output = Self>
    + Neg<Output = Self>
{
    /// A constant, i.e. a value with vanishing derivatives.
    fn from_f64(c: f64) -> Self;

    fn zero() -> Self {
        Self::from_f64(0.0)
    }

    /// The value part, discarding any derivative information.
    fn value(&self) -> f64;

    fn scale(&self, c: f64) -> Self;

    /// True only if the value and all carried derivatives are exactly zero.
    fn is_zero(&self) -> bool;

    fn mul_ref(&self, other: &Self) -> Self {
        self.clone() * other.clone()
    }

    /// `self += a * b`
    fn mul_add_assign(&mut self, a: &Self, b: &Self) {
        let prod = a.mul_ref(b);
        *self = self.clone() + prod;
    }

    /// `self += c * a`
    fn scaled_add_assign(&mut self, c: f64, a: &Self) {
        let s = a.scale(c);
        *self = self.clone() + s;
    }
}

impl Scalar for f64 {
    #[inline]
    fn from_f64(c: f64) -> Self {
        c
    }

    #[inline]
    fn value(&self) -> f64 {
        *self
    }

    #[inline]
    fn scale(&self, c: f64) -> Self {
        self * c
    }

    #[inline]
    fn is_zero(&self) -> bool {
        *self == 0.0
    }

    #[inline]
    fn mul_ref(&self, other: &Self) -> Self {
        self * other
    }

    #[inline]
    fn mul_add_assign(&mut self, a: &Self, b: &Self) {
        *self += a * b;
    }

    #[inline]
    fn scaled_add_assign(&mut self, c: f64, a: &Self) {
        *self += c * a;
    }
}

/// A scalar that carries one more order of derivative information than
/// [`Differentiable::Lower`].
///
/// `partial(i)` is the chart derivative along coordinate `i`, one order lower.
/// `lower()` truncates to the lower order without differentiating.
pub trait Differentiable: Scalar {
    type Lower: Scalar;

    fn lower(&self) -> Self::Lower;

    fn partial(&self, i: usize) -> Self::Lower;
}
