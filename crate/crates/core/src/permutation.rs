use crate::error::{LinalgError, Result};
use crate::matrix::Matrix;
use crate::scalar::Scalar;

/// A permutation of `0..n`.
///
/// As a column operation, `A P` has column `k` equal to column `map[k]` of `A`.
/// As a matrix, `P[map[k], k] = 1`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Permutation {
    map: Vec<usize>,
}

impl Permutation {
    pub fn new(map: Vec<usize>) -> Result<Self> {
        let n = map.len();
        let mut seen = vec![false; n];
        for &i in &map {
            if i >= n {
                return Err(LinalgError::InvalidPermutation(format!(
                    "index {i} out of range for size {n}"
                )));
            }
            if seen[i] {
                return Err(LinalgError::InvalidPermutation(format!("index {i} repeated")));
            }
            seen[i] = true;
        }
        Ok(Permutation { map })
    }

    pub fn identity(n: usize) -> Self {
        Permutation {
            map: (0..n).collect(),
        }
    }

    /// `leading` first (in the given order), then the remaining indices ascending.
    pub fn leading_first(n: usize, leading: &[usize]) -> Result<Self> {
        let mut taken = vec![false; n];
        let mut map = Vec::with_capacity(n);
        for &i in leading {
            if i >= n || taken[i] {
                return Err(LinalgError::InvalidPermutation(format!(
                    "bad leading index {i} for size {n}"
                )));
            }
            taken[i] = true;
            map.push(i);
        }
        map.extend((0..n).filter(|&i| !taken[i]));
        Ok(Permutation { map })
    }

    pub fn len(&self) -> usize {
        self.map.len()
    }

    pub fn is_empty(&self) -> bool {
        self.map.is_empty()
    }

    pub fn map(&self) -> &[usize] {
        &self.map
    }

    pub fn inverse(&self) -> Self {
        let mut inv = vec![0; self.map.len()];
        for (k, &i) in self.map.iter().enumerate() {
            inv[i] = k;
        }
        Permutation { map: inv }
    }

    pub fn compose(&self, other: &Permutation) -> Result<Self> {
        if self.len() != other.len() {
            return Err(LinalgError::InvalidPermutation("size mismatch".into()));
        }
        Ok(Permutation {
            map: other.map.iter().map(|&k| self.map[k]).collect(),
        })
    }

    /// `A P`
    pub fn permute_columns<T: Scalar>(&self, a: &Matrix<T>) -> Result<Matrix<T>> {
        self.check(a.cols())?;
        a.select_columns(&self.map)
    }

    /// `P^T A`: row `k` of the result is row `map[k]` of `A`.
    pub fn permute_rows<T: Scalar>(&self, a: &Matrix<T>) -> Result<Matrix<T>> {
        self.check(a.rows())?;
        a.select_rows(&self.map)
    }

    pub fn to_matrix<T: Scalar>(&self) -> Matrix<T> {
        let n = self.map.len();
        Matrix::from_fn(n, n, |i, k| {
            if self.map[k] == i {
                T::one()
            } else {
                T::zero()
            }
        })
    }

    fn check(&self, n: usize) -> Result<()> {
        if n != self.map.len() {
            return Err(LinalgError::DimensionMismatch {
                op: "permute",
                left: (self.map.len(), self.map.len()),
                right: (n, n),
            });
        }
        Ok(())
    }
}
