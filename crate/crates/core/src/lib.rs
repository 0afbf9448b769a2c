//! Rank-revealing dense factorizations over exact rationals and `f64`.
//!
//! Three independent constructions (basis transport, ULV, and CR) each
//! establish that the row rank of a matrix equals its column rank, and a
//! brute-force minor search serves as ground truth on small inputs.

pub mod elimination;
pub mod error;
pub mod io;
pub mod matrix;
pub mod oracle;
pub mod orthogonalization;
pub mod permutation;
pub mod report;
pub mod scalar;
pub mod skeleton;
pub mod subspaces;
pub mod tolerance;
pub mod utv;
pub mod verify;

pub use error::{LinalgError, Result};
pub use matrix::Matrix;
pub use permutation::Permutation;
pub use scalar::{ratio, Rational, Scalar};
pub use tolerance::{ToleranceContext, ZeroTest};
