//! Gaussian elimination: RREF, CR decomposition, null spaces and the rank
//! normal form `A = E1 [I_r 0; 0 0] E2`.

use std::time::Instant;

use crate::error::{LinalgError, Result};
use crate::matrix::Matrix;
use crate::permutation::Permutation;
use crate::report::{relative_residual, CheckLog, RankReportEntry, Route, QR_RESIDUAL_TOL};
use crate::scalar::Scalar;
use crate::tolerance::{ToleranceContext, ZeroTest};

/// Row reduced echelon form with the elimination recorded.
#[derive(Debug, Clone, PartialEq)]
pub struct RrefResult<T> {
    /// Full `m x n` RREF, zero rows included.
    pub r0: Matrix<T>,
    /// Strictly increasing pivot columns; the length is the rank.
    pub pivot_cols: Vec<usize>,
    /// Invertible `m x m` matrix with `row_ops * A == r0`.
    pub row_ops: Matrix<T>,
    /// Inverse of `row_ops`, accumulated alongside it.
    pub row_ops_inv: Matrix<T>,
}

impl<T: Scalar> RrefResult<T> {
    pub fn rank(&self) -> usize {
        self.pivot_cols.len()
    }

    /// Columns that carry no pivot.
    pub fn free_cols(&self) -> Vec<usize> {
        let n = self.r0.cols();
        let mut is_pivot = vec![false; n];
        for &p in &self.pivot_cols {
            is_pivot[p] = true;
        }
        (0..n).filter(|&j| !is_pivot[j]).collect()
    }

    /// The nonzero rows of `r0`.
    pub fn reduced(&self) -> Matrix<T> {
        self.r0.block(0, self.rank(), 0, self.r0.cols())
    }
}

pub fn rref<T: Scalar>(a: &Matrix<T>, tol: &ToleranceContext) -> RrefResult<T> {
    rref_with(a, &tol.zero_test(a))
}

pub(crate) fn rref_with<T: Scalar>(a: &Matrix<T>, zero: &ZeroTest) -> RrefResult<T> {
    let (m, n) = a.shape();
    let mut w = a.clone();
    let mut ops = Matrix::<T>::identity(m);
    let mut inv = Matrix::<T>::identity(m);
    let mut pivots = Vec::new();
    let mut pr = 0;

    for c in 0..n {
        if pr == m {
            break;
        }
        let Some(p) = choose_pivot(&w, pr, c, zero) else {
            for i in pr..m {
                w.set(i, c, T::zero());
            }
            continue;
        };
        if p != pr {
            swap_rows(&mut w, p, pr);
            swap_rows(&mut ops, p, pr);
            swap_cols(&mut inv, p, pr);
        }
        let piv = w[(pr, c)].clone();
        let piv_inv = T::one() / piv.clone();
        scale_row(&mut w, pr, &piv_inv);
        scale_row(&mut ops, pr, &piv_inv);
        // inverse picks up a column scaling by the pivot
        for i in 0..m {
            let v = inv[(i, pr)].clone() * piv.clone();
            inv.set(i, pr, v);
        }
        w.set(pr, c, T::one());
        for i in 0..m {
            if i == pr {
                continue;
            }
            let f = w[(i, c)].clone();
            if f.is_zero() {
                continue;
            }
            axpy_row(&mut w, i, pr, &f);
            axpy_row(&mut ops, i, pr, &f);
            // row_i -= f row_pr  <=>  inverse: col_pr += f col_i
            for k in 0..m {
                let mut v = inv[(k, pr)].clone();
                v.add_prod(&f, &inv[(k, i)]);
                inv.set(k, pr, v);
            }
            w.set(i, c, T::zero());
        }
        pivots.push(c);
        pr += 1;
    }
    // Rows below the last pivot were judged zero; make that literal.
    for i in pr..m {
        for j in 0..n {
            w.set(i, j, T::zero());
        }
    }
    RrefResult {
        r0: w,
        pivot_cols: pivots,
        row_ops: ops,
        row_ops_inv: inv,
    }
}

/// Exact: first nonzero entry at or below `start`. Float: largest magnitude,
/// accepted only above the zero threshold.
fn choose_pivot<T: Scalar>(w: &Matrix<T>, start: usize, c: usize, zero: &ZeroTest) -> Option<usize> {
    if T::EXACT {
        (start..w.rows()).find(|&i| !w[(i, c)].is_zero())
    } else {
        let best = (start..w.rows()).max_by(|&i, &k| {
            w[(i, c)]
                .abs_f64()
                .partial_cmp(&w[(k, c)].abs_f64())
                .unwrap_or(std::cmp::Ordering::Equal)
        })?;
        (!zero.is_zero(&w[(best, c)])).then_some(best)
    }
}

fn swap_rows<T: Scalar>(w: &mut Matrix<T>, a: usize, b: usize) {
    for j in 0..w.cols() {
        let x = w[(a, j)].clone();
        let y = w[(b, j)].clone();
        w.set(a, j, y);
        w.set(b, j, x);
    }
}

fn swap_cols<T: Scalar>(w: &mut Matrix<T>, a: usize, b: usize) {
    for i in 0..w.rows() {
        let x = w[(i, a)].clone();
        let y = w[(i, b)].clone();
        w.set(i, a, y);
        w.set(i, b, x);
    }
}

fn scale_row<T: Scalar>(w: &mut Matrix<T>, r: usize, s: &T) {
    for j in 0..w.cols() {
        let v = w[(r, j)].clone() * s.clone();
        w.set(r, j, v);
    }
}

/// `row_target -= f * row_src`
fn axpy_row<T: Scalar>(w: &mut Matrix<T>, target: usize, src: usize, f: &T) {
    for j in 0..w.cols() {
        let mut v = w[(target, j)].clone();
        v.sub_prod(f, &w[(src, j)]);
        w.set(target, j, v);
    }
}

/// Column rank by elimination.
pub fn rank<T: Scalar>(a: &Matrix<T>, tol: &ToleranceContext) -> usize {
    rref(a, tol).rank()
}

/// Inverse by Gauss-Jordan; `Singular` when elimination finds fewer than `n` pivots.
pub fn inverse<T: Scalar>(a: &Matrix<T>, tol: &ToleranceContext) -> Result<Matrix<T>> {
    if a.rows() != a.cols() {
        return Err(LinalgError::Shape {
            op: "inverse",
            requirement: "a square matrix",
            rows: a.rows(),
            cols: a.cols(),
        });
    }
    let rr = rref(a, tol);
    if rr.rank() < a.rows() {
        return Err(LinalgError::Singular);
    }
    Ok(rr.row_ops)
}

/// Solves `A X = B` for square nonsingular `A` by eliminating `[A | B]`.
pub fn solve<T: Scalar>(a: &Matrix<T>, b: &Matrix<T>, tol: &ToleranceContext) -> Result<Matrix<T>> {
    let n = a.rows();
    if a.cols() != n {
        return Err(LinalgError::Shape {
            op: "solve",
            requirement: "a square coefficient matrix",
            rows: a.rows(),
            cols: a.cols(),
        });
    }
    let aug = a.hstack(b)?;
    let rr = rref_with(&aug, &tol.zero_test(a));
    if rr.pivot_cols.iter().take_while(|&&p| p < n).count() < n {
        return Err(LinalgError::Singular);
    }
    Ok(rr.r0.block(0, n, n, aug.cols()))
}

/// `A = C R` with `C` the pivot columns of `A` and `R` its RREF without zero rows.
#[derive(Debug, Clone, PartialEq)]
pub struct CRFactors<T> {
    pub c: Matrix<T>,
    pub r: Matrix<T>,
    pub pivot_cols: Vec<usize>,
}

impl<T: Scalar> CRFactors<T> {
    pub fn rank(&self) -> usize {
        self.pivot_cols.len()
    }

    /// Entries stored by the factors: `r (m + n)`.
    pub fn storage(&self) -> usize {
        self.rank() * (self.c.rows() + self.r.cols())
    }

    pub fn product(&self) -> Matrix<T> {
        self.c.matmul(&self.r).expect("CR factors are conformable")
    }
}

pub fn cr_decompose<T: Scalar>(a: &Matrix<T>, tol: &ToleranceContext) -> CRFactors<T> {
    cr_from_rref(a, &rref(a, tol))
}

pub(crate) fn cr_from_rref<T: Scalar>(a: &Matrix<T>, rr: &RrefResult<T>) -> CRFactors<T> {
    CRFactors {
        c: a
            .select_columns(&rr.pivot_cols)
            .expect("pivot columns are in range"),
        r: rr.reduced(),
        pivot_cols: rr.pivot_cols.clone(),
    }
}

/// Basis of `N(A)` as the columns of an `n x (n - r)` matrix, one per free column.
pub fn null_space_basis<T: Scalar>(a: &Matrix<T>, tol: &ToleranceContext) -> Matrix<T> {
    null_basis_from_rref(&rref(a, tol))
}

pub(crate) fn null_basis_from_rref<T: Scalar>(rr: &RrefResult<T>) -> Matrix<T> {
    let n = rr.r0.cols();
    let free = rr.free_cols();
    let mut basis = Matrix::zeros(n, free.len());
    for (k, &f) in free.iter().enumerate() {
        basis.set(f, k, T::one());
        for (i, &p) in rr.pivot_cols.iter().enumerate() {
            basis.set(p, k, -rr.r0[(i, f)].clone());
        }
    }
    basis
}

/// `A = E1 [I_r 0; 0 0] E2` with `E1`, `E2` invertible.
#[derive(Debug, Clone, PartialEq)]
pub struct RankNormalForm<T> {
    pub e1: Matrix<T>,
    pub core_rank: usize,
    pub e2: Matrix<T>,
}

impl<T: Scalar> RankNormalForm<T> {
    pub fn core(&self) -> Matrix<T> {
        Matrix::rank_block(self.e1.rows(), self.e2.rows(), self.core_rank)
    }

    pub fn product(&self) -> Matrix<T> {
        self.e1
            .matmul(&self.core())
            .and_then(|x| x.matmul(&self.e2))
            .expect("normal form factors are conformable")
    }
}

/// Built from the same elimination pass as [`rref`]: `E1` undoes the row
/// operations, and `E2 = [I_r F; 0 I] P^T` moves the pivot columns back.
pub fn rank_normal_form<T: Scalar>(a: &Matrix<T>, tol: &ToleranceContext) -> RankNormalForm<T> {
    let rr = rref(a, tol);
    let n = a.cols();
    let r = rr.rank();
    let perm = Permutation::leading_first(n, &rr.pivot_cols).expect("pivots are distinct");
    // R0 P = [I_r F; 0 0]
    let r0p = perm.permute_columns(&rr.r0).expect("sizes agree");
    let lifted = Matrix::from_fn(n, n, |i, j| {
        if i < r {
            r0p[(i, j)].clone()
        } else if i == j {
            T::one()
        } else {
            T::zero()
        }
    });
    let e2 = perm
        .inverse()
        .permute_columns(&lifted)
        .expect("sizes agree");
    RankNormalForm {
        e1: rr.row_ops_inv,
        core_rank: r,
        e2,
    }
}

/// Row rank equals column rank, argued through `A = C R`:
/// the column rank is the pivot count, `R` has row rank `r` through its
/// embedded `I_r`, and `R = (C^T C)^{-1} C^T A` together with `A = C R`
/// sandwiches the row rank of `A` to that of `R`. The row rank of `A` is
/// also measured directly by eliminating `A^T`.
pub fn prove_rank_equality_via_cr<T: Scalar>(
    a: &Matrix<T>,
    tol: &ToleranceContext,
) -> RankReportEntry {
    let started = Instant::now();
    let mut log = CheckLog::default();
    let zero = tol.zero_test(a);
    let rr = rref_with(a, &zero);
    let cr = cr_from_rref(a, &rr);
    let col_rank = cr.rank();

    let identity_block = cr
        .r
        .select_columns(&cr.pivot_cols)
        .expect("pivots in range");
    log.check("r_pivot_block_is_identity", identity_block == Matrix::identity(col_rank));
    let r_row_rank = identity_block.diagonal().iter().filter(|d| !d.is_zero()).count();

    let product = cr.product();
    if T::EXACT {
        log.check("a_equals_cr", product == *a);
    } else {
        let res = relative_residual(
            product.sub(a).expect("same shape").norm_fro_f64(),
            a.norm_fro_f64(),
        );
        log.residual("cr_reconstruction", res, QR_RESIDUAL_TOL);
    }

    // R = (C^T C)^{-1} C^T A: rows of R are combinations of rows of A.
    let ct = cr.c.transpose();
    let gram = ct.matmul(&cr.c).expect("conformable");
    match inverse(&gram, tol) {
        Ok(gram_inv) => {
            let recovered = gram_inv
                .matmul(&ct)
                .and_then(|x| x.matmul(a))
                .expect("conformable");
            if T::EXACT {
                log.check("r_in_row_space_of_a", recovered == cr.r);
            } else {
                let res = relative_residual(
                    recovered.sub(&cr.r).expect("same shape").norm_fro_f64(),
                    cr.r.norm_fro_f64(),
                );
                log.residual("sandwich", res, QR_RESIDUAL_TOL.sqrt());
            }
        }
        Err(_) => {
            log.check("c_gram_nonsingular", false);
        }
    }

    let row_rank = rank(&a.transpose(), tol);
    log.check("row_rank_of_r_equals_r", r_row_rank == col_rank);
    log.finish(Route::Cr, row_rank, col_rank, started)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::{ratio, Rational};

    fn q(rows: &[&[i64]]) -> Matrix<Rational> {
        Matrix::from_integers(rows).unwrap()
    }

    fn exact() -> ToleranceContext {
        ToleranceContext::exact()
    }

    #[test]
    fn rref_of_identity() {
        let rr = rref(&Matrix::<Rational>::identity(3), &exact());
        assert_eq!(rr.r0, Matrix::identity(3));
        assert_eq!(rr.pivot_cols, vec![0, 1, 2]);
    }

    #[test]
    fn rref_of_rank_one() {
        let a = q(&[&[1, 2], &[2, 4]]);
        let rr = rref(&a, &exact());
        assert_eq!(rr.r0, q(&[&[1, 2], &[0, 0]]));
        assert_eq!(rr.pivot_cols, vec![0]);
        assert_eq!(rr.row_ops.matmul(&a).unwrap(), rr.r0);
        assert_eq!(rr.row_ops.matmul(&rr.row_ops_inv).unwrap(), Matrix::identity(2));
    }

    #[test]
    fn rref_of_outer_product_matches_oracle() {
        let a = q(&[&[3, 4], &[6, 8]]);
        let r = rank(&a, &exact());
        assert_eq!(r, 1);
        assert_eq!(crate::oracle::rank_oracle(&a, &exact()).unwrap(), r);
    }

    #[test]
    fn rref_handles_degenerate_shapes() {
        for (m, n) in [(0, 3), (3, 0), (0, 0), (2, 3)] {
            let rr = rref(&Matrix::<Rational>::zeros(m, n), &exact());
            assert_eq!(rr.rank(), 0);
            assert_eq!(rr.r0.shape(), (m, n));
            assert_eq!(rr.row_ops, Matrix::identity(m));
        }
    }

    #[test]
    fn rref_skips_leading_zero_column() {
        let a = q(&[&[0, 2, 4], &[0, 1, 3]]);
        let rr = rref(&a, &exact());
        assert_eq!(rr.pivot_cols, vec![1, 2]);
        assert_eq!(rr.r0, q(&[&[0, 1, 0], &[0, 0, 1]]));
    }

    #[test]
    fn cr_examples() {
        let cr = cr_decompose(&q(&[&[3, 4], &[6, 8]]), &exact());
        assert_eq!(cr.c, q(&[&[3], &[6]]));
        assert_eq!(
            cr.r,
            Matrix::from_rows(vec![vec![Rational::from_i64(1), ratio(4, 3)]]).unwrap()
        );
        assert_eq!(cr.storage(), 4);

        let cr = cr_decompose(&Matrix::<Rational>::identity(2), &exact());
        assert_eq!(cr.c, Matrix::identity(2));
        assert_eq!(cr.r, Matrix::identity(2));

        let z = Matrix::<Rational>::zeros(2, 3);
        let cr = cr_decompose(&z, &exact());
        assert_eq!(cr.c.shape(), (2, 0));
        assert_eq!(cr.r.shape(), (0, 3));
        assert_eq!(cr.product(), z);
    }

    #[test]
    fn null_space_examples() {
        let ns = null_space_basis(&q(&[&[1, 2], &[2, 4]]), &exact());
        assert_eq!(ns, q(&[&[-2], &[1]]));
        assert_eq!(null_space_basis(&Matrix::<Rational>::identity(3), &exact()).shape(), (3, 0));
        let ns = null_space_basis(&Matrix::<Rational>::zeros(2, 3), &exact());
        assert_eq!(ns, Matrix::identity(3));
    }

    #[test]
    fn normal_form_examples() {
        let nf = rank_normal_form(&Matrix::<Rational>::identity(3), &exact());
        assert_eq!(nf.core_rank, 3);
        assert_eq!(nf.e1, Matrix::identity(3));
        assert_eq!(nf.e2, Matrix::identity(3));

        let a = q(&[&[3, 4], &[6, 8]]);
        let nf = rank_normal_form(&a, &exact());
        assert_eq!(nf.core_rank, 1);
        assert_eq!(nf.product(), a);

        let z = Matrix::<Rational>::zeros(2, 3);
        let nf = rank_normal_form(&z, &exact());
        assert_eq!(nf.core_rank, 0);
        assert_eq!(nf.product(), z);
        assert_eq!(rank(&nf.e1, &exact()), 2);
        assert_eq!(rank(&nf.e2, &exact()), 3);
    }

    #[test]
    fn normal_form_with_interior_free_column() {
        let a = q(&[&[1, 2, 0, 1], &[2, 4, 1, 1], &[3, 6, 1, 2]]);
        let nf = rank_normal_form(&a, &exact());
        assert_eq!(nf.core_rank, 2);
        assert_eq!(nf.product(), a);
    }

    #[test]
    fn inverse_round_trip_and_singular() {
        let a = q(&[&[2, 1], &[7, 4]]);
        let inv = inverse(&a, &exact()).unwrap();
        assert_eq!(inv, q(&[&[4, -1], &[-7, 2]]));
        assert_eq!(inverse(&q(&[&[1, 2], &[2, 4]]), &exact()), Err(LinalgError::Singular));
    }

    #[test]
    fn solve_matches_inverse() {
        let a = q(&[&[2, 1], &[7, 4]]);
        let b = q(&[&[1, 0], &[3, 5]]);
        let x = solve(&a, &b, &exact()).unwrap();
        assert_eq!(a.matmul(&x).unwrap(), b);
        assert_eq!(solve(&q(&[&[1, 2], &[2, 4]]), &b, &exact()), Err(LinalgError::Singular));
    }

    #[test]
    fn cr_route_reports() {
        let e = prove_rank_equality_via_cr(&q(&[&[3, 4], &[6, 8]]), &exact());
        assert_eq!((e.row_rank, e.col_rank, e.pass), (1, 1, true));
        assert!(e.residuals.is_empty());
        let e = prove_rank_equality_via_cr(&Matrix::<Rational>::identity(4), &exact());
        assert_eq!((e.row_rank, e.col_rank, e.pass), (4, 4, true));
    }

    #[test]
    fn float_rref_uses_partial_pivoting() {
        let a = Matrix::<f64>::from_rows(vec![vec![1e-3, 1.0], vec![1.0, 1.0]]).unwrap();
        let rr = rref(&a, &ToleranceContext::default());
        assert_eq!(rr.pivot_cols, vec![0, 1]);
        let back = rr.row_ops.matmul(&a).unwrap();
        assert!(back.max_abs_diff(&Matrix::identity(2)).unwrap() < 1e-12);
        let e = prove_rank_equality_via_cr(&a, &ToleranceContext::default());
        assert!(e.pass);
        assert!(!e.residuals.is_empty());
    }
}
