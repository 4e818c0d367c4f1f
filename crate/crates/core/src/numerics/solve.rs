//! Shifted Hermitian solves via Cholesky factorisation.

use num_complex::Complex64;

use super::matrix::{ComplexMatrix, ComplexVector};
use super::NumericsError;

/// Solves `(Xi + lambda I) x = b` for Hermitian PSD `Xi` and `lambda ≥ 0`.
///
/// The shifted matrix is factored as `L L^H`. A pivot at or below
/// `n · ε · max_diag` is treated as singular, which is how the `lambda = 0`,
/// rank-deficient case surfaces.
pub fn solve_shifted(
    xi: &ComplexMatrix,
    lambda: f64,
    b: &[Complex64],
) -> Result<ComplexVector, NumericsError> {
    if !xi.is_square() || xi.rows() != b.len() {
        return Err(NumericsError::InvalidInput(format!(
            "solve_shifted: {}x{} system with right-hand side of length {}",
            xi.rows(),
            xi.cols(),
            b.len()
        )));
    }
    if !(lambda >= 0.0) || !lambda.is_finite() {
        return Err(NumericsError::InvalidInput(format!(
            "shift must be finite and non-negative, got {lambda}"
        )));
    }
    let n = b.len();
    let a = xi.shift_diagonal(lambda);
    let max_diag = (0..n).map(|i| a[(i, i)].re.abs()).fold(0.0, f64::max);
    let pivot_floor = n as f64 * f64::EPSILON * max_diag;

    // Lower-triangular Cholesky factor, stored densely.
    let mut l = ComplexMatrix::zeros(n, n);
    for j in 0..n {
        let mut d = a[(j, j)].re;
        for k in 0..j {
            d -= l[(j, k)].norm_sqr();
        }
        if !(d > pivot_floor) {
            return Err(NumericsError::SingularSystem);
        }
        let d = d.sqrt();
        l[(j, j)] = Complex64::new(d, 0.0);
        for i in j + 1..n {
            let mut s = a[(i, j)];
            for k in 0..j {
                s -= l[(i, k)] * l[(j, k)].conj();
            }
            l[(i, j)] = s / d;
        }
    }

    // L y = b
    let mut y = vec![Complex64::new(0.0, 0.0); n];
    for i in 0..n {
        let mut s = b[i];
        for k in 0..i {
            s -= l[(i, k)] * y[k];
        }
        y[i] = s / l[(i, i)];
    }
    // L^H x = y
    let mut x = vec![Complex64::new(0.0, 0.0); n];
    for i in (0..n).rev() {
        let mut s = y[i];
        for k in i + 1..n {
            s -= l[(k, i)].conj() * x[k];
        }
        x[i] = s / l[(i, i)];
    }
    if x.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
        return Err(NumericsError::SingularSystem);
    }
    Ok(x)
}
