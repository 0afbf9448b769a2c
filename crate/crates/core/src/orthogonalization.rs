//! Projections, Gram-Schmidt, and QR / LQ built on it.
//!
//! Rationals have no square roots, so the exact regime never normalizes:
//! orthogonal factors have mutually orthogonal columns (or rows) whose
//! squared lengths are stored next to them, and the triangular factor
//! absorbs the missing scale. Every identity (`A == QR`, `Q^T Q == diag(d)`)
//! therefore stays inside the rationals. In float mode the stored squared
//! lengths are all 1 and the factors are orthonormal in the usual sense.
//! [`QRFactors::normalized`] and [`LQFactors::normalized`] render the
//! conventional unit-length factors in `f64`.

use crate::elimination::{rank, solve};
use crate::error::{LinalgError, Result};
use crate::matrix::{dot, Matrix};
use crate::scalar::Scalar;
use crate::tolerance::{ToleranceContext, ZeroTest};

/// Projection of a vector onto a line or a column space.
#[derive(Debug, Clone, PartialEq)]
pub struct ProjectionResult<T> {
    /// The solution `x` of the normal equations (one entry for a line).
    pub coefficients: Vec<T>,
    pub projection: Vec<T>,
    pub residual: Vec<T>,
}

/// Projects `a` onto the line through `b`: `x = a^T b / b^T b`.
pub fn project_onto_vector<T: Scalar>(a: &[T], b: &[T]) -> Result<ProjectionResult<T>> {
    if a.len() != b.len() {
        return Err(LinalgError::DimensionMismatch {
            op: "project_onto_vector",
            left: (a.len(), 1),
            right: (b.len(), 1),
        });
    }
    let bb = dot(b, b);
    if bb.is_zero() {
        return Err(LinalgError::ZeroVector);
    }
    let x = dot(a, b) / bb;
    let projection: Vec<T> = b.iter().map(|bi| x.clone() * bi.clone()).collect();
    let residual = a
        .iter()
        .zip(&projection)
        .map(|(ai, pi)| ai.clone() - pi.clone())
        .collect();
    Ok(ProjectionResult {
        coefficients: vec![x],
        projection,
        residual,
    })
}

/// Projects `a` onto the column space of `basis` by solving
/// `B^T B x = B^T a` with elimination.
pub fn project_onto_subspace<T: Scalar>(
    a: &[T],
    basis: &Matrix<T>,
    tol: &ToleranceContext,
) -> Result<ProjectionResult<T>> {
    if basis.rows() != a.len() {
        return Err(LinalgError::DimensionMismatch {
            op: "project_onto_subspace",
            left: basis.shape(),
            right: (a.len(), 1),
        });
    }
    let k = basis.cols();
    let r = rank(basis, tol);
    if r < k {
        return Err(LinalgError::DependentBasis { rank: r, expected: k });
    }
    let bt = basis.transpose();
    let gram = bt.matmul(basis)?;
    let rhs = Matrix::column_vector(bt.mul_vec(a)?);
    let x = solve(&gram, &rhs, tol)?.column(0);
    let projection = basis.mul_vec(&x)?;
    let residual = a
        .iter()
        .zip(&projection)
        .map(|(ai, pi)| ai.clone() - pi.clone())
        .collect();
    Ok(ProjectionResult {
        coefficients: x,
        projection,
        residual,
    })
}

/// Output of [`gram_schmidt`]: `input == basis * coefficients`.
#[derive(Debug, Clone, PartialEq)]
pub struct GramSchmidt<T> {
    /// `m x k` matrix of mutually orthogonal columns, one per kept input column.
    pub basis: Matrix<T>,
    /// Squared lengths of the basis columns (all 1 in float mode).
    pub norms_sq: Vec<T>,
    /// `k x n` upper-trapezoidal coefficients.
    pub coefficients: Matrix<T>,
    /// Input columns that contributed a new direction.
    pub kept: Vec<usize>,
}

impl<T: Scalar> GramSchmidt<T> {
    /// Input columns found to be combinations of earlier ones.
    pub fn dependent(&self) -> Vec<usize> {
        let n = self.coefficients.cols();
        (0..n).filter(|j| !self.kept.contains(j)).collect()
    }
}

/// Running orthogonal basis shared by Gram-Schmidt, QR and completion.
struct OrthoBasis<T> {
    dim: usize,
    vectors: Vec<Vec<T>>,
    norms_sq: Vec<T>,
}

impl<T: Scalar> OrthoBasis<T> {
    fn new(dim: usize) -> Self {
        OrthoBasis {
            dim,
            vectors: Vec::new(),
            norms_sq: Vec::new(),
        }
    }

    /// Classical Gram-Schmidt: every coefficient comes from the original
    /// vector. Float mode runs a second pass over the residual and folds
    /// its coefficients into the first.
    fn orthogonalize(&self, a: &[T]) -> (Vec<T>, Vec<T>) {
        let mut coeffs = self.coefficients_against(a);
        let mut v = self.subtract(a, &coeffs);
        if !T::EXACT && !self.vectors.is_empty() {
            let again = self.coefficients_against(&v);
            v = self.subtract(&v, &again);
            for (c, d) in coeffs.iter_mut().zip(again) {
                *c = c.clone() + d;
            }
        }
        (v, coeffs)
    }

    fn coefficients_against(&self, a: &[T]) -> Vec<T> {
        self.vectors
            .iter()
            .zip(&self.norms_sq)
            .map(|(b, d)| dot(b, a) / d.clone())
            .collect()
    }

    fn subtract(&self, a: &[T], coeffs: &[T]) -> Vec<T> {
        let mut v = a.to_vec();
        for (b, c) in self.vectors.iter().zip(coeffs) {
            for (vi, bi) in v.iter_mut().zip(b) {
                vi.sub_prod(c, bi);
            }
        }
        v
    }

    /// Appends a nonzero residual; returns the coefficient of `a` on it
    /// (1 in exact mode, the residual length in float mode).
    fn push(&mut self, v: Vec<T>) -> T {
        let nsq = dot(&v, &v);
        if T::EXACT {
            self.vectors.push(v);
            self.norms_sq.push(nsq);
            T::one()
        } else {
            let len = nsq.sqrt().expect("float regime has square roots");
            let inv = T::one() / len.clone();
            self.vectors
                .push(v.into_iter().map(|x| x * inv.clone()).collect());
            self.norms_sq.push(T::one());
            len
        }
    }

    /// Adds the first canonical vector (in index order) that is not already
    /// in the span. Float mode requires a residual large enough to be
    /// well conditioned; some `e_t` always qualifies since the squared
    /// residuals of all `e_t` sum to `dim - len`.
    fn push_canonical(&mut self) -> bool {
        let floor = 1.0 / (self.dim as f64 + 1.0);
        for t in 0..self.dim {
            let e: Vec<T> = (0..self.dim)
                .map(|i| if i == t { T::one() } else { T::zero() })
                .collect();
            let (v, _) = self.orthogonalize(&e);
            let nsq = dot(&v, &v);
            let ok = if T::EXACT {
                !nsq.is_zero()
            } else {
                nsq.to_f64() > floor
            };
            if ok {
                self.push(v);
                return true;
            }
        }
        false
    }

    fn is_negligible(v: &[T], zero: &ZeroTest) -> bool {
        zero.is_zero_norm_sq(&dot(v, v))
    }

    fn len(&self) -> usize {
        self.vectors.len()
    }

    fn to_matrix(&self) -> Matrix<T> {
        Matrix::from_columns(self.dim, &self.vectors).expect("basis vectors share a length")
    }
}

/// Classical Gram-Schmidt over the columns of `columns`. Columns whose
/// residual vanishes are recorded as dependent and contribute no vector.
pub fn gram_schmidt<T: Scalar>(columns: &Matrix<T>, tol: &ToleranceContext) -> GramSchmidt<T> {
    let (m, n) = columns.shape();
    let zero = tol.zero_test(columns);
    let mut basis = OrthoBasis::new(m);
    let mut coeff_cols: Vec<Vec<T>> = Vec::with_capacity(n);
    let mut kept = Vec::new();
    for j in 0..n {
        let a = columns.column(j);
        let (v, mut coeffs) = basis.orthogonalize(&a);
        if !OrthoBasis::is_negligible(&v, &zero) {
            coeffs.push(basis.push(v));
            kept.push(j);
        }
        coeff_cols.push(coeffs);
    }
    let k = basis.len();
    let coefficients = Matrix::from_fn(k, n, |i, j| {
        coeff_cols[j].get(i).cloned().unwrap_or_else(T::zero)
    });
    GramSchmidt {
        basis: basis.to_matrix(),
        norms_sq: basis.norms_sq,
        coefficients,
        kept,
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum QrMode {
    Reduced,
    Full,
}

/// `A = Q R` with `Q^T Q = diag(col_norms_sq)` and `R` upper triangular.
#[derive(Debug, Clone, PartialEq)]
pub struct QRFactors<T> {
    pub q: Matrix<T>,
    pub r: Matrix<T>,
    pub col_norms_sq: Vec<T>,
    pub mode: QrMode,
    /// Input columns that were combinations of earlier ones; `R` has a zero
    /// diagonal entry there.
    pub dependent_cols: Vec<usize>,
}

impl<T: Scalar> QRFactors<T> {
    pub fn product(&self) -> Matrix<T> {
        self.q.matmul(&self.r).expect("QR factors are conformable")
    }

    pub fn is_rank_deficient(&self) -> bool {
        !self.dependent_cols.is_empty()
    }

    /// Unit-length `Q` and matching `R` in `f64`.
    pub fn normalized(&self) -> (Matrix<f64>, Matrix<f64>) {
        let lens: Vec<f64> = self.col_norms_sq.iter().map(|d| d.to_f64().sqrt()).collect();
        let q = Matrix::from_fn(self.q.rows(), self.q.cols(), |i, j| {
            self.q[(i, j)].to_f64() / lens[j]
        });
        let r = Matrix::from_fn(self.r.rows(), self.r.cols(), |i, j| {
            self.r[(i, j)].to_f64() * lens[i]
        });
        (q, r)
    }
}

/// QR by classical Gram-Schmidt (`m >= n`). A dependent column gets a zero
/// diagonal in `R` and its slot in `Q` is filled by the next canonical
/// direction outside the current span, so `A == QR` still holds. Full mode
/// completes `Q` with such directions ("silent columns") and pads `R` with
/// zero rows.
pub fn qr<T: Scalar>(a: &Matrix<T>, mode: QrMode, tol: &ToleranceContext) -> Result<QRFactors<T>> {
    let (m, n) = a.shape();
    if m < n {
        return Err(LinalgError::Shape {
            op: "qr",
            requirement: "rows >= cols (use lq for wide matrices)",
            rows: m,
            cols: n,
        });
    }
    let zero = tol.zero_test(a);
    let mut basis = OrthoBasis::new(m);
    let r_rows = if mode == QrMode::Full { m } else { n };
    let mut r = Matrix::zeros(r_rows, n);
    let mut dependent = Vec::new();
    for j in 0..n {
        let (v, coeffs) = basis.orthogonalize(&a.column(j));
        for (i, c) in coeffs.into_iter().enumerate() {
            r.set(i, j, c);
        }
        if OrthoBasis::is_negligible(&v, &zero) {
            dependent.push(j);
            basis.push_canonical();
        } else {
            let diag = basis.push(v);
            r.set(j, j, diag);
        }
    }
    if mode == QrMode::Full {
        while basis.len() < m {
            basis.push_canonical();
        }
    }
    Ok(QRFactors {
        q: basis.to_matrix(),
        r,
        col_norms_sq: basis.norms_sq,
        mode,
        dependent_cols: dependent,
    })
}

/// `A = L Q` with `Q Q^T = diag(row_norms_sq)` and `L` lower triangular.
#[derive(Debug, Clone, PartialEq)]
pub struct LQFactors<T> {
    pub l: Matrix<T>,
    pub q: Matrix<T>,
    pub row_norms_sq: Vec<T>,
    pub mode: QrMode,
    /// Input rows that were combinations of earlier ones; `L` has a zero
    /// diagonal entry there.
    pub dependent_rows: Vec<usize>,
}

impl<T: Scalar> LQFactors<T> {
    pub fn product(&self) -> Matrix<T> {
        self.l.matmul(&self.q).expect("LQ factors are conformable")
    }

    pub fn normalized(&self) -> (Matrix<f64>, Matrix<f64>) {
        let lens: Vec<f64> = self.row_norms_sq.iter().map(|d| d.to_f64().sqrt()).collect();
        let l = Matrix::from_fn(self.l.rows(), self.l.cols(), |i, j| {
            self.l[(i, j)].to_f64() * lens[j]
        });
        let q = Matrix::from_fn(self.q.rows(), self.q.cols(), |i, j| {
            self.q[(i, j)].to_f64() / lens[i]
        });
        (l, q)
    }
}

/// LQ through QR of the transpose: `A^T = Q0 R` gives `A = R^T Q0^T`.
pub fn lq<T: Scalar>(a: &Matrix<T>, mode: QrMode, tol: &ToleranceContext) -> Result<LQFactors<T>> {
    if a.cols() < a.rows() {
        return Err(LinalgError::Shape {
            op: "lq",
            requirement: "cols >= rows (use qr for tall matrices)",
            rows: a.rows(),
            cols: a.cols(),
        });
    }
    let f = qr(&a.transpose(), mode, tol)?;
    Ok(LQFactors {
        l: f.r.transpose(),
        q: f.q.transpose(),
        row_norms_sq: f.col_norms_sq,
        mode,
        dependent_rows: f.dependent_cols,
    })
}

/// `Q^T Q` compared against `diag(norms_sq)`: exact equality for rationals,
/// largest deviation for floats. Returns the deviation (0 when exact holds,
/// infinity when an exact check fails).
pub fn orthogonality_defect<T: Scalar>(q: &Matrix<T>, norms_sq: &[T]) -> f64 {
    let gram = q.transpose().matmul(q).expect("conformable");
    let target = Matrix::from_fn(gram.rows(), gram.cols(), |i, j| {
        if i == j {
            norms_sq[i].clone()
        } else {
            T::zero()
        }
    });
    if T::EXACT {
        if gram == target {
            0.0
        } else {
            f64::INFINITY
        }
    } else {
        gram.max_abs_diff(&target).expect("same shape")
    }
}
