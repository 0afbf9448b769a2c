//! The four fundamental subspaces, row-basis transport, and the
//! row-space / null-space split of a vector.

use std::time::Instant;

use crate::elimination::{null_basis_from_rref, rank, rref, RrefResult};
use crate::error::{LinalgError, Result};
use crate::matrix::Matrix;
use crate::orthogonalization::project_onto_subspace;
use crate::report::{CheckLog, RankReportEntry, Route};
use crate::scalar::Scalar;
use crate::tolerance::ToleranceContext;

/// Bases (as matrix columns) of `C(A)`, `C(A^T)`, `N(A)` and `N(A^T)`.
#[derive(Debug, Clone, PartialEq)]
pub struct SubspaceBases<T> {
    /// `m x r`: the pivot columns of `A`.
    pub col_basis: Matrix<T>,
    /// `n x r`: the nonzero rows of `rref(A)`, as columns.
    pub row_basis: Matrix<T>,
    /// `n x (n - r)`
    pub null_basis: Matrix<T>,
    /// `m x (m - r)`, from `rref(A^T)`.
    pub left_null_basis: Matrix<T>,
    pub rank: usize,
}

impl<T: Scalar> SubspaceBases<T> {
    /// Names of the invariants that fail for `a`; empty when all hold.
    pub fn check(&self, a: &Matrix<T>, tol: &ToleranceContext) -> Vec<&'static str> {
        let (m, n) = a.shape();
        let r = self.rank;
        let mut failed = Vec::new();
        let mut expect = |ok: bool, name: &'static str| {
            if !ok {
                failed.push(name);
            }
        };
        expect(self.col_basis.shape() == (m, r), "col_basis_shape");
        expect(self.row_basis.shape() == (n, r), "row_basis_shape");
        expect(self.null_basis.rows() == n, "null_basis_shape");
        expect(self.left_null_basis.rows() == m, "left_null_basis_shape");
        expect(r + self.null_basis.cols() == n, "rank_plus_nullity_is_n");
        expect(r + self.left_null_basis.cols() == m, "rank_plus_left_nullity_is_m");
        for (name, b) in [
            ("col_basis_independent", &self.col_basis),
            ("row_basis_independent", &self.row_basis),
            ("null_basis_independent", &self.null_basis),
            ("left_null_basis_independent", &self.left_null_basis),
        ] {
            expect(rank(b, tol) == b.cols(), name);
        }
        let zero = tol.zero_test(a);
        let products = [
            ("a_times_null_is_zero", a.matmul(&self.null_basis)),
            ("at_times_left_null_is_zero", a.transpose().matmul(&self.left_null_basis)),
            ("row_basis_perp_null", self.row_basis.transpose().matmul(&self.null_basis)),
            ("col_basis_perp_left_null", self.col_basis.transpose().matmul(&self.left_null_basis)),
        ];
        for (name, p) in products {
            expect(p.map(|p| p.all_zero(&zero)).unwrap_or(false), name);
        }
        let full = self.row_basis.hstack(&self.null_basis);
        expect(full.map(|f| rank(&f, tol) == n).unwrap_or(false), "row_and_null_span_rn");
        failed
    }
}

fn row_basis_from_rref<T: Scalar>(rr: &RrefResult<T>) -> Matrix<T> {
    rr.reduced().transpose()
}

pub fn four_subspaces<T: Scalar>(a: &Matrix<T>, tol: &ToleranceContext) -> SubspaceBases<T> {
    let rr = rref(a, tol);
    let rrt = rref(&a.transpose(), tol);
    SubspaceBases {
        col_basis: a.select_columns(&rr.pivot_cols).expect("pivots in range"),
        row_basis: row_basis_from_rref(&rr),
        null_basis: null_basis_from_rref(&rr),
        left_null_basis: null_basis_from_rref(&rrt),
        rank: rr.rank(),
    }
}

/// Maps a row-space basis `{r_i}` to `{A r_i}`, which is a column-space basis.
///
/// The input is checked to be a basis of `C(A^T)` (right size, independent,
/// every column in the row space), and the output is checked to be
/// independent and to span `C(A)`.
pub fn transport_row_basis<T: Scalar>(
    a: &Matrix<T>,
    row_basis: &Matrix<T>,
    tol: &ToleranceContext,
) -> Result<Matrix<T>> {
    let rr = rref(a, tol);
    let r = rr.rank();
    if row_basis.rows() != a.cols() {
        return Err(LinalgError::DimensionMismatch {
            op: "transport_row_basis",
            left: a.shape(),
            right: row_basis.shape(),
        });
    }
    let given = rank(row_basis, tol);
    if row_basis.cols() != r || given != r {
        return Err(LinalgError::Precondition {
            check: "row basis has rank(A) independent columns".into(),
            measured: given.min(row_basis.cols()),
            required: r,
        });
    }
    if r > 0 {
        let space = row_basis_from_rref(&rr);
        let zero = tol.zero_test(row_basis);
        for j in 0..r {
            let p = project_onto_subspace(&row_basis.column(j), &space, tol)?;
            if !p.residual.iter().all(|x| zero.is_zero(x)) {
                return Err(LinalgError::Precondition {
                    check: format!("row basis column {j} lies in the row space"),
                    measured: 0,
                    required: 1,
                });
            }
        }
    }
    let image = a.matmul(row_basis)?;
    let image_rank = rank(&image, tol);
    if image_rank != r {
        return Err(LinalgError::Verification(format!(
            "transported basis has rank {image_rank}, expected {r}"
        )));
    }
    let col_basis = a.select_columns(&rr.pivot_cols)?;
    let joint = rank(&image.hstack(&col_basis)?, tol);
    if joint != r {
        return Err(LinalgError::Verification(format!(
            "transported basis does not span the column space (joint rank {joint})"
        )));
    }
    Ok(image)
}

/// Splits `x = x_r + x_n` with `x_r` in the row space and `x_n` in the null
/// space, by projecting `x` onto the row space. This is the executable
/// reading of the picture in which `A x_r = A x` lands in the column space.
pub fn split_vector<T: Scalar>(
    a: &Matrix<T>,
    x: &[T],
    tol: &ToleranceContext,
) -> Result<(Vec<T>, Vec<T>)> {
    if x.len() != a.cols() {
        return Err(LinalgError::DimensionMismatch {
            op: "split_vector",
            left: a.shape(),
            right: (x.len(), 1),
        });
    }
    let rr = rref(a, tol);
    if rr.rank() == 0 {
        return Ok((vec![T::zero(); x.len()], x.to_vec()));
    }
    let p = project_onto_subspace(x, &row_basis_from_rref(&rr), tol)?;
    Ok((p.projection, p.residual))
}

/// Row rank equals column rank, argued elementarily: transporting a row
/// basis of size `r_row` through `A` yields `r_row` independent columns, so
/// `r_row <= r_col`; doing the same for `A^T` gives `r_col <= r_row`.
pub fn prove_rank_equality_elementary<T: Scalar>(
    a: &Matrix<T>,
    tol: &ToleranceContext,
) -> RankReportEntry {
    let started = Instant::now();
    let mut log = CheckLog::default();
    let at = a.transpose();

    let rows = row_basis_from_rref(&rref(a, tol));
    let row_rank = rows.cols();
    let image = a.matmul(&rows).expect("conformable");
    log.check("row_basis_image_independent", rank(&image, tol) == row_rank);

    let cols = row_basis_from_rref(&rref(&at, tol));
    let col_rank = cols.cols();
    let image_t = at.matmul(&cols).expect("conformable");
    log.check("col_basis_image_independent", rank(&image_t, tol) == col_rank);

    // Orthogonality N(A) _|_ C(A^T) backs the dimension count.
    let null = null_space_of(a, tol);
    let zero = tol.zero_test(a);
    let perp = rows
        .transpose()
        .matmul(&null)
        .map(|p| p.all_zero(&zero))
        .unwrap_or(false);
    log.check("row_space_perp_null_space", perp);
    log.check("rank_nullity", row_rank + null.cols() == a.cols());

    log.finish(Route::Elementary, row_rank, col_rank, started)
}

fn null_space_of<T: Scalar>(a: &Matrix<T>, tol: &ToleranceContext) -> Matrix<T> {
    null_basis_from_rref(&rref(a, tol))
}
