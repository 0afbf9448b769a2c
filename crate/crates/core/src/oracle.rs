//! Brute-force rank by minors.
//!
//! The rank is the largest `k` for which some `k x k` minor is nonzero.
//! Determinants come from cofactor (Laplace) expansion only, so no division
//! ever happens and the rational path stays fraction-free for integer input.
//! Nothing here shares code with elimination or orthogonalization.

use std::collections::HashMap;

use crate::error::{LinalgError, Result};
use crate::matrix::Matrix;
use crate::scalar::Scalar;
use crate::tolerance::ToleranceContext;

/// Largest `min(m, n)` the oracle accepts.
pub const ORACLE_LIMIT: usize = 8;

/// Rank as the order of the largest nonvanishing minor.
///
/// Minors are scanned by increasing order; once every `k x k` minor
/// vanishes, all larger ones do too (Laplace expansion), so the scan stops.
pub fn rank_oracle<T: Scalar>(a: &Matrix<T>, tol: &ToleranceContext) -> Result<usize> {
    let min_dim = a.rows().min(a.cols());
    if min_dim > ORACLE_LIMIT {
        return Err(LinalgError::OracleTooLarge {
            min_dim,
            limit: ORACLE_LIMIT,
        });
    }
    // Expand over the short side; det(M^T) = det(M).
    let work = if a.cols() > a.rows() {
        a.transpose()
    } else {
        a.clone()
    };
    let scale = work.max_abs().max(1.0);
    let mut rank = 0;
    for k in 1..=min_dim {
        let threshold = if T::EXACT {
            0.0
        } else {
            tol.zero_tol * if tol.relative { scale.powi(k as i32) } else { 1.0 }
        };
        let nonzero = |d: &T| {
            if T::EXACT {
                !d.is_zero()
            } else {
                d.abs_f64() > threshold
            }
        };
        let found = RowSubsets::new(work.rows(), k)
            .any(|rows| minors_of_rows(&work, &rows).values().any(nonzero));
        if !found {
            break;
        }
        rank = k;
    }
    Ok(rank)
}

/// Determinant of a square matrix by cofactor expansion.
pub fn determinant<T: Scalar>(a: &Matrix<T>) -> Result<T> {
    if a.rows() != a.cols() {
        return Err(LinalgError::Shape {
            op: "determinant",
            requirement: "a square matrix",
            rows: a.rows(),
            cols: a.cols(),
        });
    }
    let n = a.rows();
    if n == 0 {
        return Ok(T::one());
    }
    if n > 24 {
        return Err(LinalgError::OracleTooLarge {
            min_dim: n,
            limit: 24,
        });
    }
    let rows: Vec<usize> = (0..n).collect();
    let full: u128 = (1u128 << n) - 1;
    Ok(minors_of_rows(a, &rows)
        .remove(&full)
        .unwrap_or_else(T::zero))
}

/// All `k x k` minors that use exactly `rows` (with `k = rows.len()`),
/// keyed by the column bitmask. Exactly-zero minors are omitted.
///
/// Level `j` holds determinants of rows `rows[..j]` against every
/// `j`-subset of columns; level `j + 1` expands along its last row.
fn minors_of_rows<T: Scalar>(a: &Matrix<T>, rows: &[usize]) -> HashMap<u128, T> {
    assert!(a.cols() <= 128, "column masks hold at most 128 columns");
    let mut level: HashMap<u128, T> = HashMap::new();
    level.insert(0, T::one());
    for (j, &row) in rows.iter().enumerate() {
        let mut next: HashMap<u128, T> = HashMap::new();
        for (&mask, det) in &level {
            for c in 0..a.cols() {
                let bit = 1u128 << c;
                if mask & bit != 0 {
                    continue;
                }
                let entry = &a[(row, c)];
                if entry.is_zero() {
                    continue;
                }
                // position of column c inside the new mask
                let pos = (mask & (bit - 1)).count_ones() as usize;
                let term = entry.clone() * det.clone();
                let slot = next.entry(mask | bit).or_insert_with(T::zero);
                if (j + pos).is_multiple_of(2) {
                    *slot = slot.clone() + term;
                } else {
                    *slot = slot.clone() - term;
                }
            }
        }
        next.retain(|_, d| !d.is_zero());
        level = next;
    }
    level
}

/// Iterator over all ascending `k`-subsets of `0..n`.
pub struct RowSubsets {
    n: usize,
    current: Option<Vec<usize>>,
}

impl RowSubsets {
    pub fn new(n: usize, k: usize) -> Self {
        let current = if k <= n { Some((0..k).collect()) } else { None };
        RowSubsets { n, current }
    }
}

impl Iterator for RowSubsets {
    type Item = Vec<usize>;

    fn next(&mut self) -> Option<Vec<usize>> {
        let out = self.current.take()?;
        let k = out.len();
        let mut next = out.clone();
        let mut i = k;
        while i > 0 {
            i -= 1;
            if next[i] < self.n - k + i {
                next[i] += 1;
                for t in i + 1..k {
                    next[t] = next[t - 1] + 1;
                }
                self.current = Some(next);
                return Some(out);
            }
        }
        Some(out)
    }
}
