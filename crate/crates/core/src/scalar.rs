//! Scalar regimes.
//!
//! Two regimes are supported: exact rationals (`Rational`, arbitrary
//! precision) and `f64`. Generic code branches on [`Scalar::EXACT`] where
//! the two regimes must behave differently (pivot choice, normalization).

use std::fmt;
use std::ops::{Add, Div, Mul, Neg, Sub};

use num::{BigInt, BigRational, Signed, ToPrimitive, Zero};

pub type Rational = BigRational;

pub trait Scalar:
    Clone
    + fmt::Debug
    + fmt::Display
    + PartialEq
    + Send
    + Sync
    + 'static
    + Add<Output = Self>
    + Sub<Output = Self>
    + Mul<Output = Self>
    + Div<Output = Self>
    + Neg<Output = Self>
{
    /// True for the rational regime, where every zero test is exact.
    const EXACT: bool;

    fn zero() -> Self;
    fn one() -> Self;
    fn from_i64(v: i64) -> Self;
    /// Exact comparison with zero; float callers normally go through a
    /// [`ZeroTest`](crate::tolerance::ZeroTest) instead.
    fn is_zero(&self) -> bool;
    fn to_f64(&self) -> f64;
    /// Square root when the regime has one. Rationals return `None`.
    fn sqrt(&self) -> Option<Self>;

    fn abs_f64(&self) -> f64 {
        self.to_f64().abs()
    }

    /// `self += a * b`
    fn add_prod(&mut self, a: &Self, b: &Self) {
        *self = self.clone() + a.clone() * b.clone();
    }

    /// `self -= a * b`
    fn sub_prod(&mut self, a: &Self, b: &Self) {
        *self = self.clone() - a.clone() * b.clone();
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
    fn from_i64(v: i64) -> Self {
        v as f64
    }
    fn is_zero(&self) -> bool {
        *self == 0.0
    }
    fn to_f64(&self) -> f64 {
        *self
    }
    fn sqrt(&self) -> Option<Self> {
        Some(f64::sqrt(*self))
    }
    fn abs_f64(&self) -> f64 {
        self.abs()
    }
    fn add_prod(&mut self, a: &Self, b: &Self) {
        *self += a * b;
    }
    fn sub_prod(&mut self, a: &Self, b: &Self) {
        *self -= a * b;
    }
}

impl Scalar for Rational {
    const EXACT: bool = true;

    fn zero() -> Self {
        <Rational as Zero>::zero()
    }
    fn one() -> Self {
        <Rational as num::One>::one()
    }
    fn from_i64(v: i64) -> Self {
        Rational::from_integer(BigInt::from(v))
    }
    fn is_zero(&self) -> bool {
        <Rational as Zero>::is_zero(self)
    }
    fn to_f64(&self) -> f64 {
        ToPrimitive::to_f64(self).unwrap_or(f64::NAN)
    }
    fn sqrt(&self) -> Option<Self> {
        None
    }
    fn abs_f64(&self) -> f64 {
        ToPrimitive::to_f64(&Signed::abs(self)).unwrap_or(f64::NAN)
    }
    fn add_prod(&mut self, a: &Self, b: &Self) {
        if !<Rational as Zero>::is_zero(a) && !<Rational as Zero>::is_zero(b) {
            *self += a * b;
        }
    }
    fn sub_prod(&mut self, a: &Self, b: &Self) {
        if !<Rational as Zero>::is_zero(a) && !<Rational as Zero>::is_zero(b) {
            *self -= a * b;
        }
    }
}

/// Shorthand for building a rational from a numerator and denominator.
pub fn ratio(numer: i64, denom: i64) -> Rational {
    Rational::new(BigInt::from(numer), BigInt::from(denom))
}
