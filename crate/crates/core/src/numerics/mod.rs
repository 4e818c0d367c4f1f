//! Dense complex linear algebra and scalar root finding.

mod bisection;
mod eigen;
mod matrix;
mod solve;

pub use bisection::{bisection, BisectionTolerance};
pub use eigen::{hermitian_eigendecompose, psd_sqrt_and_inverse, HermitianEigen, DEFAULT_PD_FLOOR};
pub use matrix::{
    conj, cosine_similarity, dot, dot_h, norm, norm_sqr, normalized, phase_normalize, scale,
    ComplexMatrix, ComplexVector,
};
pub use solve::solve_shifted;

use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum NumericsError {
    #[error("invalid input: {0}")]
    InvalidInput(String),
    #[error("no convergence after {iterations} iterations")]
    NoConvergence { iterations: usize },
    #[error("matrix is not positive definite (min eigenvalue {min_eigenvalue:e} < floor {floor:e})")]
    NotPositiveDefinite { min_eigenvalue: f64, floor: f64 },
    #[error("shifted system is singular")]
    SingularSystem,
    #[error("invalid bisection bracket: {0}")]
    BracketError(String),
}
