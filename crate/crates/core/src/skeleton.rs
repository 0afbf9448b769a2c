//! Skeleton (CUR) decomposition `A = C U^{-1} R` from actual columns and
//! rows of `A`, and the invertibility of their intersection.

use crate::elimination::{inverse, rank, rref};
use crate::error::{LinalgError, Result};
use crate::matrix::Matrix;
use crate::oracle::{determinant, RowSubsets};
use crate::scalar::Scalar;
use crate::tolerance::ToleranceContext;

#[derive(Debug, Clone, PartialEq)]
pub struct CURFactors<T> {
    /// `A[:, col_idx]`
    pub c: Matrix<T>,
    /// `A[row_idx, col_idx]`, nonsingular.
    pub u: Matrix<T>,
    /// `A[row_idx, :]`
    pub r: Matrix<T>,
    pub u_inv: Matrix<T>,
    pub row_idx: Vec<usize>,
    pub col_idx: Vec<usize>,
}

impl<T: Scalar> CURFactors<T> {
    pub fn rank(&self) -> usize {
        self.col_idx.len()
    }

    pub fn product(&self) -> Matrix<T> {
        self.c
            .matmul(&self.u_inv)
            .and_then(|x| x.matmul(&self.r))
            .expect("CUR factors are conformable")
    }

    /// Columns `i` of `a` for which `a_i != C U^{-1} r_i` exactly, where
    /// `r_i` is column `i` of `R`.
    pub fn column_identity_failures(&self, a: &Matrix<T>) -> Vec<usize> {
        let cu = self.c.matmul(&self.u_inv).expect("conformable");
        (0..a.cols())
            .filter(|&i| {
                let rebuilt = cu.mul_vec(&self.r.column(i)).expect("conformable");
                rebuilt != a.column(i)
            })
            .collect()
    }
}

/// First-independent columns of `a` (the RREF pivot columns).
pub fn select_independent_columns<T: Scalar>(a: &Matrix<T>, tol: &ToleranceContext) -> Vec<usize> {
    rref(a, tol).pivot_cols
}

/// First-independent rows of `n`, found as the pivot columns of `n^T`.
pub fn select_independent_rows<T: Scalar>(n: &Matrix<T>, tol: &ToleranceContext) -> Vec<usize> {
    rref(&n.transpose(), tol).pivot_cols
}

/// Columns `J` are picked from `A`; rows `I` are then picked from the
/// column block `N = A[:, J]`, which makes `A[I, J]` nonsingular.
pub fn cur_decompose<T: Scalar>(a: &Matrix<T>, tol: &ToleranceContext) -> Result<CURFactors<T>> {
    let col_idx = select_independent_columns(a, tol);
    let c = a.select_columns(&col_idx)?;
    let row_idx = select_independent_rows(&c, tol);
    let r = a.select_rows(&row_idx)?;
    let u = c.select_rows(&row_idx)?;
    let u_inv = inverse(&u, tol)?;
    Ok(CURFactors {
        c,
        u,
        r,
        u_inv,
        row_idx,
        col_idx,
    })
}

/// Witness for the intersection check.
#[derive(Debug, Clone, PartialEq)]
pub struct IntersectionCheck<T> {
    pub invertible: bool,
    pub u: Matrix<T>,
    pub u_inv: Option<Matrix<T>>,
}

/// Validates a user-supplied selection (`|I| = |J| = rank`, `A[:, J]` of
/// full column rank, `A[I, :]` of full row rank) and inverts `A[I, J]`.
/// Under valid preconditions the intersection is always nonsingular, so
/// `invertible == false` signals a defect in this library.
pub fn check_intersection_invertible<T: Scalar>(
    a: &Matrix<T>,
    rows: &[usize],
    cols: &[usize],
    tol: &ToleranceContext,
) -> Result<IntersectionCheck<T>> {
    for (name, idx, bound) in [("rows", rows, a.rows()), ("cols", cols, a.cols())] {
        if let Some(&index) = idx.iter().find(|&&i| i >= bound) {
            return Err(LinalgError::IndexOutOfBounds { index, bound });
        }
        let mut sorted = idx.to_vec();
        sorted.sort_unstable();
        sorted.dedup();
        if sorted.len() != idx.len() {
            return Err(LinalgError::Precondition {
                check: format!("{name} indices are distinct"),
                measured: sorted.len(),
                required: idx.len(),
            });
        }
    }
    let r = rank(a, tol);
    for (check, len) in [("row index count equals rank", rows.len()), ("column index count equals rank", cols.len())] {
        if len != r {
            return Err(LinalgError::Precondition {
                check: check.to_string(),
                measured: len,
                required: r,
            });
        }
    }
    let col_block = a.select_columns(cols)?;
    let col_rank = rank(&col_block, tol);
    if col_rank != r {
        return Err(LinalgError::Precondition {
            check: "A[:, J] has full column rank".into(),
            measured: col_rank,
            required: r,
        });
    }
    let row_block = a.select_rows(rows)?;
    let row_rank = rank(&row_block.transpose(), tol);
    if row_rank != r {
        return Err(LinalgError::Precondition {
            check: "A[I, :] has full row rank".into(),
            measured: row_rank,
            required: r,
        });
    }
    let u = a.submatrix(rows, cols)?;
    let u_inv = inverse(&u, tol).ok();
    Ok(IntersectionCheck {
        invertible: u_inv.is_some(),
        u,
        u_inv,
    })
}

/// Summary of an exhaustive sweep over index selections.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SweepSummary {
    pub rank: usize,
    /// `(I, J)` pairs satisfying both independence conditions.
    pub valid_pairs: usize,
    /// Valid pairs whose intersection determinant vanished.
    pub singular_pairs: Vec<(Vec<usize>, Vec<usize>)>,
}

/// Enumerates every `(I, J)` with `|I| = |J| = rank`, `A[I, :]` of full row
/// rank and `A[:, J]` of full column rank, and evaluates `det(A[I, J])` by
/// cofactor expansion. Intended for small matrices.
pub fn exhaustive_intersection_sweep<T: Scalar>(
    a: &Matrix<T>,
    tol: &ToleranceContext,
) -> Result<SweepSummary> {
    let r = rank(a, tol);
    let zero = tol.zero_test_for_scale::<T>(a.max_abs().max(1.0).powi(r as i32));
    let good_rows: Vec<Vec<usize>> = RowSubsets::new(a.rows(), r)
        .filter(|rows| {
            a.select_rows(rows)
                .map(|b| rank(&b.transpose(), tol) == r)
                .unwrap_or(false)
        })
        .collect();
    let good_cols: Vec<Vec<usize>> = RowSubsets::new(a.cols(), r)
        .filter(|cols| {
            a.select_columns(cols)
                .map(|b| rank(&b, tol) == r)
                .unwrap_or(false)
        })
        .collect();
    let mut singular = Vec::new();
    for rows in &good_rows {
        for cols in &good_cols {
            let det = determinant(&a.submatrix(rows, cols)?)?;
            if zero.is_zero(&det) {
                singular.push((rows.clone(), cols.clone()));
            }
        }
    }
    Ok(SweepSummary {
        rank: r,
        valid_pairs: good_rows.len() * good_cols.len(),
        singular_pairs: singular,
    })
}
