//! ULV / URV factorizations and rank decompositions.
//!
//! [`ulv`] follows the constructive existence argument step by step:
//! move the independent columns to the front (`A P = Z [I_r E]`), take the
//! full QR of `Z`, then the full LQ of `[R  R E]`, and undo the permutation
//! with `V = V0 P^T` (for a permutation `P^{-1} = P^T`).
//!
//! The rank used throughout is the column rank found by elimination; row
//! ranks only appear in [`prove_rank_equality_via_ulv`], where they are the
//! quantity under test.
//!
//! Orthogonal factors follow the root-free convention of
//! [`orthogonalization`](crate::orthogonalization): `U^T U = diag(u_norms_sq)`
//! and `V V^T = diag(v_norms_sq)`, both identities in float mode.

use std::time::Instant;

use crate::elimination::{inverse, rank, rref_with};
use crate::error::{LinalgError, Result};
use crate::matrix::Matrix;
use crate::orthogonalization::{lq, orthogonality_defect, project_onto_subspace, qr, QrMode};
use crate::permutation::Permutation;
use crate::report::{
    relative_residual, CheckLog, RankReportEntry, Route, ORTHOGONALITY_TOL, PRODUCT_RESIDUAL_TOL,
};
use crate::scalar::Scalar;
use crate::tolerance::ToleranceContext;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Triangle {
    Lower,
    Upper,
}

/// `A = U T V` with an `r x r` triangular core in the top-left of `T`.
#[derive(Debug, Clone, PartialEq)]
pub struct UTVFactors<T> {
    pub u: Matrix<T>,
    pub t: Matrix<T>,
    pub v: Matrix<T>,
    pub rank: usize,
    pub shape: Triangle,
    /// Squared lengths of the columns of `u`.
    pub u_norms_sq: Vec<T>,
    /// Squared lengths of the rows of `v`.
    pub v_norms_sq: Vec<T>,
}

impl<T: Scalar> UTVFactors<T> {
    /// First `r` columns of `u`.
    pub fn reduced_u(&self) -> Matrix<T> {
        self.u.block(0, self.u.rows(), 0, self.rank)
    }

    /// First `r` rows of `v`.
    pub fn reduced_v(&self) -> Matrix<T> {
        self.v.block(0, self.rank, 0, self.v.cols())
    }

    /// The `r x r` triangular core.
    pub fn core(&self) -> Matrix<T> {
        self.t.block(0, self.rank, 0, self.rank)
    }

    pub fn product(&self) -> Matrix<T> {
        self.u
            .matmul(&self.t)
            .and_then(|x| x.matmul(&self.v))
            .expect("UTV factors are conformable")
    }

    pub fn reduced_product(&self) -> Matrix<T> {
        self.reduced_u()
            .matmul(&self.core())
            .and_then(|x| x.matmul(&self.reduced_v()))
            .expect("reduced UTV factors are conformable")
    }

    /// Core has the declared triangle and every other block of `t` is zero,
    /// compared exactly in both regimes.
    pub fn has_triangular_structure(&self) -> bool {
        let core = self.core();
        let core_ok = match self.shape {
            Triangle::Lower => core.is_lower_triangular(),
            Triangle::Upper => core.is_upper_triangular(),
        };
        let r = self.rank;
        let outside_zero = (0..self.t.rows()).all(|i| {
            (0..self.t.cols()).all(|j| (i < r && j < r) || self.t[(i, j)].is_zero())
        });
        core_ok && outside_zero
    }

    /// Largest deviation of `U^T U` and `V V^T` from their diagonal targets.
    pub fn orthogonality_defect(&self) -> f64 {
        orthogonality_defect(&self.u, &self.u_norms_sq)
            .max(orthogonality_defect(&self.v.transpose(), &self.v_norms_sq))
    }
}

pub fn ulv<T: Scalar>(a: &Matrix<T>, tol: &ToleranceContext) -> UTVFactors<T> {
    let (m, n) = a.shape();
    let zero = tol.zero_test(a);
    let rr = rref_with(a, &zero);
    let r = rr.rank();
    if r == 0 {
        return UTVFactors {
            u: Matrix::identity(m),
            t: Matrix::zeros(m, n),
            v: Matrix::identity(n),
            rank: 0,
            shape: Triangle::Lower,
            u_norms_sq: vec![T::one(); m],
            v_norms_sq: vec![T::one(); n],
        };
    }

    // A P = [Z  Z E]
    let perm = Permutation::leading_first(n, &rr.pivot_cols).expect("pivots are distinct");
    let free = rr.free_cols();
    let z = a.select_columns(&rr.pivot_cols).expect("pivots in range");
    let e = if T::EXACT {
        rr.r0.submatrix(&(0..r).collect::<Vec<_>>(), &free).expect("in range")
    } else {
        let cols: Vec<Vec<T>> = free
            .iter()
            .map(|&j| {
                project_onto_subspace(&a.column(j), &z, tol)
                    .map(|p| p.coefficients)
                    .unwrap_or_else(|_| rr.r0.block(0, r, j, j + 1).column(0))
            })
            .collect();
        Matrix::from_columns(r, &cols).expect("r coefficients per column")
    };

    // Z = U [R; 0]
    let zq = qr(&z, QrMode::Full, tol).expect("pivot block is tall");
    let rz = zq.r.block(0, r, 0, r);

    // [R  R E] = [L 0] V0
    let w = rz.hstack(&rz.matmul(&e).expect("conformable")).expect("same rows");
    let wl = lq(&w, QrMode::Full, tol).expect("r <= n");
    let mut t = Matrix::zeros(m, n);
    for i in 0..r {
        for j in 0..=i {
            t.set(i, j, wl.l[(i, j)].clone());
        }
    }

    // V = V0 P^{-1}
    let v = perm
        .inverse()
        .permute_columns(&wl.q)
        .expect("sizes agree");

    UTVFactors {
        u: zq.q,
        t,
        v,
        rank: r,
        shape: Triangle::Lower,
        u_norms_sq: zq.col_norms_sq,
        v_norms_sq: wl.row_norms_sq,
    }
}

/// URV as the transpose dual of ULV: `A^T = U' L V'` gives `A = V'^T L^T U'^T`.
pub fn urv<T: Scalar>(a: &Matrix<T>, tol: &ToleranceContext) -> UTVFactors<T> {
    let f = ulv(&a.transpose(), tol);
    UTVFactors {
        u: f.v.transpose(),
        t: f.t.transpose(),
        v: f.u.transpose(),
        rank: f.rank,
        shape: Triangle::Upper,
        u_norms_sq: f.v_norms_sq,
        v_norms_sq: f.u_norms_sq,
    }
}

/// Where the triangular core goes in a rank decomposition.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RankSplit {
    /// `D = U0 L`, `F = V0`
    DLF,
    /// `D = U0`, `F = L V0`
    DFL,
}

/// `A = D F` with `D` of shape `m x r` and `F` of shape `r x n`.
#[derive(Debug, Clone, PartialEq)]
pub struct RankDecompFactors<T> {
    pub d: Matrix<T>,
    pub f: Matrix<T>,
    pub split: RankSplit,
}

impl<T: Scalar> RankDecompFactors<T> {
    pub fn rank(&self) -> usize {
        self.d.cols()
    }

    /// Entries stored by the factors: `r (m + n)`.
    pub fn storage(&self) -> usize {
        self.rank() * (self.d.rows() + self.f.cols())
    }

    pub fn product(&self) -> Matrix<T> {
        self.d.matmul(&self.f).expect("rank factors are conformable")
    }
}

/// Rank decomposition read off the reduced ULV factors.
pub fn rank_decompose<T: Scalar>(
    a: &Matrix<T>,
    tol: &ToleranceContext,
    split: RankSplit,
) -> RankDecompFactors<T> {
    rank_decompose_from(&ulv(a, tol), split)
}

pub fn rank_decompose_from<T: Scalar>(f: &UTVFactors<T>, split: RankSplit) -> RankDecompFactors<T> {
    let (u0, core, v0) = (f.reduced_u(), f.core(), f.reduced_v());
    let (d, f) = match split {
        RankSplit::DLF => (u0.matmul(&core).expect("conformable"), v0),
        RankSplit::DFL => (u0, core.matmul(&v0).expect("conformable")),
    };
    RankDecompFactors { d, f, split }
}

/// Change of factor between two rank decompositions of the same matrix:
/// `P = F2 F1^T (F1 F1^T)^{-1}`, returned only after `D1 == D2 P` and
/// `F1 == P^{-1} F2` have been confirmed.
pub fn connect_rank_decompositions<T: Scalar>(
    d1: &Matrix<T>,
    f1: &Matrix<T>,
    d2: &Matrix<T>,
    f2: &Matrix<T>,
    tol: &ToleranceContext,
) -> Result<Matrix<T>> {
    let r = d1.cols();
    if d2.shape() != d1.shape() || f1.rows() != r || f2.shape() != f1.shape() {
        return Err(LinalgError::DimensionMismatch {
            op: "connect_rank_decompositions",
            left: d1.shape(),
            right: f1.shape(),
        });
    }
    let a1 = d1.matmul(f1)?;
    let a2 = d2.matmul(f2)?;
    if !same_matrix(&a1, &a2) {
        return Err(LinalgError::Verification(
            "D1 F1 and D2 F2 are different matrices".into(),
        ));
    }
    for (name, m) in [("d1", d1), ("d2", d2)] {
        let rk = rank(m, tol);
        if rk != r {
            return Err(LinalgError::Precondition {
                check: format!("{name} has full column rank"),
                measured: rk,
                required: r,
            });
        }
    }
    for (name, m) in [("f1", f1), ("f2", f2)] {
        let rk = rank(&m.transpose(), tol);
        if rk != r {
            return Err(LinalgError::Precondition {
                check: format!("{name} has full row rank"),
                measured: rk,
                required: r,
            });
        }
    }
    let f1t = f1.transpose();
    let gram_inv = inverse(&f1.matmul(&f1t)?, tol)?;
    let p = f2.matmul(&f1t)?.matmul(&gram_inv)?;
    let p_inv = inverse(&p, tol)?;
    if !same_matrix(&d2.matmul(&p)?, d1) {
        return Err(LinalgError::Verification("D1 != D2 P".into()));
    }
    if !same_matrix(&p_inv.matmul(f2)?, f1) {
        return Err(LinalgError::Verification("F1 != P^-1 F2".into()));
    }
    Ok(p)
}

fn same_matrix<T: Scalar>(x: &Matrix<T>, y: &Matrix<T>) -> bool {
    if T::EXACT {
        x == y
    } else {
        let diff = x.sub(y).expect("same shape").norm_fro_f64();
        relative_residual(diff, y.norm_fro_f64()) <= PRODUCT_RESIDUAL_TOL
    }
}

/// Row rank equals column rank, argued through `A = U0 [L 0; 0 0] V0`.
///
/// With `U = U0^T` and `V = V0^T`, `D = U A V` is block-triangular, so its
/// row and column ranks are both the number of nonzero core diagonal
/// entries. Ranks of `A`, `U A` and `U A V` (and of their transposes) are
/// then measured independently by elimination and must all agree.
pub fn prove_rank_equality_via_ulv<T: Scalar>(
    a: &Matrix<T>,
    tol: &ToleranceContext,
) -> RankReportEntry {
    let started = Instant::now();
    let mut log = CheckLog::default();
    let f = ulv(a, tol);
    let r = f.rank;

    log.check("ulv_core_triangular", f.has_triangular_structure());
    let defect = f.orthogonality_defect();
    if T::EXACT {
        log.check("ulv_orthogonality", defect == 0.0);
        log.check("a_equals_utv", f.product() == *a);
        log.check("a_equals_reduced_utv", f.reduced_product() == *a);
    } else {
        log.residual("ulv_orthogonality", defect, ORTHOGONALITY_TOL);
        let norm = a.norm_fro_f64();
        let res = relative_residual(f.product().sub(a).expect("shape").norm_fro_f64(), norm);
        log.residual("ulv_reconstruction", res, PRODUCT_RESIDUAL_TOL);
    }

    let u = f.u.transpose();
    let v = f.v.transpose();
    let b = u.matmul(a).expect("conformable");
    let d = b.matmul(&v).expect("conformable");

    // Block structure of D: zero outside the leading r x r lower-triangular core.
    let dz = tol.zero_test(&d);
    let structural = (0..d.rows()).all(|i| {
        (0..d.cols()).all(|j| (i < r && j <= i) || dz.is_zero(&d[(i, j)]))
    });
    log.check("d_block_lower_triangular", structural);
    let d_rank = (0..r).filter(|&i| !dz.is_zero(&d[(i, i)])).count();
    log.check("d_core_diagonal_nonzero", d_rank == r);

    let col_a = rank(a, tol);
    let col_b = rank(&b, tol);
    let col_d = rank(&d, tol);
    let row_a = rank(&a.transpose(), tol);
    let row_b = rank(&b.transpose(), tol);
    let row_d = rank(&d.transpose(), tol);
    log.check("col_rank_a_equals_ulv_rank", col_a == r);
    log.check("col_rank_preserved_by_u", col_b == col_a);
    log.check("col_rank_preserved_by_v", col_d == col_b);
    log.check("row_rank_preserved_by_u", row_b == row_a);
    log.check("row_rank_preserved_by_v", row_d == row_b);
    log.check("d_ranks_structural", col_d == d_rank && row_d == d_rank);

    log.finish(Route::Ulv, row_a, r, started)
}
