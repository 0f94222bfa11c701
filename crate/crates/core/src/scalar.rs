use std::cmp::Ordering;
use std::fmt::Debug;
use std::ops::{Add, Mul, Neg, Sub};

use crate::exact::QSqrt2;

/// Coefficient type of behaviors and Bell expressions: exact `QSqrt2` or `f64`.
pub trait Scalar:
    Clone
    + PartialEq
    + Debug
    + Add<Output = Self>
    + Sub<Output = Self>
    + Mul<Output = Self>
    + Neg<Output = Self>
{
    /// Whether values of this type are exact.
    const EXACT: bool;

    fn zero() -> Self;
    fn one() -> Self;
    fn from_ratio(n: i64, d: i64) -> Self;
    fn sqrt2() -> Self;
    fn to_f64(&self) -> f64;

    /// `cos` and `sin` of `k·π/4`.
    fn cos_sin_quarter_pi(k: i64) -> (Self, Self);

    /// Exact comparison for exact types, `partial_cmp` for floats.
    fn compare(&self, other: &Self) -> Ordering;

    /// Equality for exact types; `|a − b| ≤ tol` for floats.
    fn close_to(&self, other: &Self, tol: f64) -> bool;

    fn frac_1_sqrt2() -> Self {
        Self::sqrt2() * Self::from_ratio(1, 2)
    }

    fn is_zero_within(&self, tol: f64) -> bool {
        self.close_to(&Self::zero(), tol)
    }
}

impl Scalar for QSqrt2 {
    const EXACT: bool = true;

    fn zero() -> Self {
        QSqrt2::zero()
    }
    fn one() -> Self {
        QSqrt2::one()
    }
    fn from_ratio(n: i64, d: i64) -> Self {
        QSqrt2::from_ratio(n, d)
    }
    fn sqrt2() -> Self {
        QSqrt2::sqrt2()
    }
    fn to_f64(&self) -> f64 {
        QSqrt2::to_f64(self)
    }
    fn cos_sin_quarter_pi(k: i64) -> (Self, Self) {
        QSqrt2::cos_sin_quarter_pi(k)
    }
    fn compare(&self, other: &Self) -> Ordering {
        self.cmp(other)
    }
    fn close_to(&self, other: &Self, _tol: f64) -> bool {
        self == other
    }
}

impl Scalar for f64 {
    const EXACT: bool = false;

    fn zero() -> Self {
        0.0
    }
    fn one() -> Self {
        1.0
    }
    fn from_ratio(n: i64, d: i64) -> Self {
        n as f64 / d as f64
    }
    fn sqrt2() -> Self {
        std::f64::consts::SQRT_2
    }
    fn to_f64(&self) -> f64 {
        *self
    }
    fn cos_sin_quarter_pi(k: i64) -> (Self, Self) {
        let t = k as f64 * std::f64::consts::FRAC_PI_4;
        (t.cos(), t.sin())
    }
    fn compare(&self, other: &Self) -> Ordering {
        self.partial_cmp(other).unwrap_or(Ordering::Equal)
    }
    fn close_to(&self, other: &Self, tol: f64) -> bool {
        (self - other).abs() <= tol
    }
}
