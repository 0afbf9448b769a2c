use crate::error::{LinalgError, Result};
use crate::matrix::Matrix;
use crate::scalar::Scalar;

/// Default relative zero tolerance for the float regime.
pub const DEFAULT_ZERO_TOL: f64 = 1e-10;

/// Zero threshold for float-mode rank decisions. Ignored in exact mode.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ToleranceContext {
    pub zero_tol: f64,
    /// Scale `zero_tol` by `max(1, max |a_ij|)` of the matrix under decomposition.
    pub relative: bool,
}

impl Default for ToleranceContext {
    fn default() -> Self {
        ToleranceContext {
            zero_tol: DEFAULT_ZERO_TOL,
            relative: true,
        }
    }
}

impl ToleranceContext {
    pub fn new(zero_tol: f64, relative: bool) -> Result<Self> {
        if !zero_tol.is_finite() || zero_tol < 0.0 {
            return Err(LinalgError::InvalidTolerance(zero_tol));
        }
        Ok(ToleranceContext { zero_tol, relative })
    }

    /// Context for exact computations. Any context works there; this one
    /// just makes the intent visible at call sites.
    pub fn exact() -> Self {
        ToleranceContext {
            zero_tol: 0.0,
            relative: false,
        }
    }

    /// Zero test calibrated to `a`.
    pub fn zero_test<T: Scalar>(&self, a: &Matrix<T>) -> ZeroTest {
        self.zero_test_for_scale::<T>(a.max_abs())
    }

    pub fn zero_test_for_scale<T: Scalar>(&self, scale: f64) -> ZeroTest {
        if T::EXACT {
            return ZeroTest {
                threshold: 0.0,
                exact: true,
            };
        }
        let factor = if self.relative { scale.max(1.0) } else { 1.0 };
        ZeroTest {
            threshold: self.zero_tol * factor,
            exact: false,
        }
    }
}

/// Treat-as-zero predicate: `|x| <= zero_tol * max(1, scale)` for floats,
/// `x == 0` for rationals.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ZeroTest {
    threshold: f64,
    exact: bool,
}

impl ZeroTest {
    pub fn exact() -> Self {
        ZeroTest {
            threshold: 0.0,
            exact: true,
        }
    }

    pub fn threshold(&self) -> f64 {
        self.threshold
    }

    pub fn is_zero<T: Scalar>(&self, x: &T) -> bool {
        if self.exact {
            x.is_zero()
        } else {
            x.abs_f64() <= self.threshold
        }
    }

    /// Zero test on a Euclidean length given as its square.
    pub fn is_zero_norm_sq<T: Scalar>(&self, norm_sq: &T) -> bool {
        if self.exact {
            norm_sq.is_zero()
        } else {
            norm_sq.to_f64().max(0.0).sqrt() <= self.threshold
        }
    }
}
