//! Dense complex linear algebra used by the operator and spectrum modules.
//!
//! Everything is column-major and generic over [`Real`](crate::Real). Sizes in
//! this crate stay below a few thousand, so the algorithms are the classical
//! dense ones: partial-pivot LU, Householder bidiagonalization for singular
//! values, one-sided Jacobi for full SVDs, and Hessenberg + shifted QR for
//! eigenvalues.

mod eigen;
mod lu;
mod matrix;
mod svd;

pub use eigen::{eigenvalues, hessenberg};
pub use lu::Lu;
pub use matrix::CMatrix;
pub use svd::{singular_values, Svd};

use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum LinalgError {
    #[error("matrix is not square ({rows}x{cols})")]
    NotSquare { rows: usize, cols: usize },
    #[error("dimension mismatch: {0}")]
    Dimension(String),
    #[error("matrix is singular to working precision (zero pivot at column {column})")]
    Singular { column: usize },
    #[error("iteration failed to converge after {iterations} iterations")]
    NonConvergence { iterations: usize },
}
