use thiserror::Error;

/// Errors raised by the factorization library.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum LinalgError {
    #[error("{op}: dimension mismatch, left is {left:?}, right is {right:?}")]
    DimensionMismatch {
        op: &'static str,
        left: (usize, usize),
        right: (usize, usize),
    },

    #[error("expected {expected} entries for a {rows}x{cols} matrix, got {found}")]
    DataLength {
        rows: usize,
        cols: usize,
        expected: usize,
        found: usize,
    },

    #[error("row {row} has {found} entries, expected {expected}")]
    RaggedRows {
        row: usize,
        expected: usize,
        found: usize,
    },

    #[error("rank oracle limited to min(m, n) <= {limit}, got {min_dim}")]
    OracleTooLarge { min_dim: usize, limit: usize },

    #[error("cannot project onto the zero vector")]
    ZeroVector,

    #[error("basis columns are dependent: rank {rank} < {expected} columns")]
    DependentBasis { rank: usize, expected: usize },

    #[error("{op} requires {requirement}, got a {rows}x{cols} matrix")]
    Shape {
        op: &'static str,
        requirement: &'static str,
        rows: usize,
        cols: usize,
    },

    #[error("matrix is singular")]
    Singular,

    #[error("invalid permutation: {0}")]
    InvalidPermutation(String),

    #[error("tolerance must be finite and nonnegative, got {0}")]
    InvalidTolerance(f64),

    #[error("index {index} out of range for dimension {bound}")]
    IndexOutOfBounds { index: usize, bound: usize },

    #[error("precondition failed: {check} (measured {measured}, required {required})")]
    Precondition {
        check: String,
        measured: usize,
        required: usize,
    },

    #[error("verification failed: {0}")]
    Verification(String),
}

pub type Result<T, E = LinalgError> = std::result::Result<T, E>;
