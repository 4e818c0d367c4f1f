//! Cyclic Jacobi eigensolver for Hermitian matrices, and the PSD square root
//! built on top of it.

use num_complex::Complex64;

use super::matrix::ComplexMatrix;
use super::NumericsError;

/// Sweep cap for the cyclic Jacobi iteration. Quadratic convergence means a
/// well-posed problem of the sizes used here finishes in well under 20.
const MAX_SWEEPS: usize = 100;

/// Default absolute eigenvalue floor below which a covariance is rejected.
pub const DEFAULT_PD_FLOOR: f64 = 1e-18;

/// Eigenpairs of a Hermitian matrix, eigenvalues ascending.
#[derive(Debug, Clone)]
pub struct HermitianEigen {
    pub eigenvalues: Vec<f64>,
    /// Column `i` is the unit-norm eigenvector for `eigenvalues[i]`.
    pub eigenvectors: ComplexMatrix,
}

impl HermitianEigen {
    pub fn dim(&self) -> usize {
        self.eigenvalues.len()
    }

    pub fn eigenvector(&self, i: usize) -> Vec<Complex64> {
        self.eigenvectors.column(i)
    }

    /// `V f(Λ) V^H`.
    pub fn reconstruct_with(&self, f: impl Fn(f64) -> f64) -> ComplexMatrix {
        let n = self.dim();
        let v = &self.eigenvectors;
        let vals: Vec<f64> = self.eigenvalues.iter().map(|&l| f(l)).collect();
        ComplexMatrix::from_fn(n, n, |i, j| {
            (0..n).map(|k| v[(i, k)] * vals[k] * v[(j, k)].conj()).sum()
        })
    }

    pub fn reconstruct(&self) -> ComplexMatrix {
        self.reconstruct_with(|l| l)
    }
}

/// Full eigendecomposition of a Hermitian matrix by cyclic complex Jacobi
/// rotations.
///
/// `tol` bounds the accepted asymmetry: `‖A − A^H‖_F ≤ tol · ‖A‖_F`. The
/// input is symmetrised before iterating.
pub fn hermitian_eigendecompose(
    a: &ComplexMatrix,
    tol: f64,
) -> Result<HermitianEigen, NumericsError> {
    if !a.is_square() {
        return Err(NumericsError::InvalidInput(format!(
            "eigendecomposition needs a square matrix, got {}x{}",
            a.rows(),
            a.cols()
        )));
    }
    if !a.is_finite() {
        return Err(NumericsError::InvalidInput(
            "matrix has non-finite entries".into(),
        ));
    }
    let scale = a.frobenius_norm();
    if a.hermitian_defect() > tol * scale {
        return Err(NumericsError::InvalidInput(format!(
            "matrix is not Hermitian: ‖A − A^H‖ = {:e}, ‖A‖ = {:e}",
            a.hermitian_defect(),
            scale
        )));
    }

    let n = a.rows();
    let mut m = ComplexMatrix::from_fn(n, n, |i, j| 0.5 * (a[(i, j)] + a[(j, i)].conj()));
    for i in 0..n {
        m[(i, i)] = Complex64::new(m[(i, i)].re, 0.0);
    }
    let mut v = ComplexMatrix::identity(n);

    if scale == 0.0 || n == 1 {
        return Ok(sorted(m, v));
    }

    // Rotations stop once the off-diagonal mass is at rounding level.
    let threshold = (n as f64 * f64::EPSILON * scale).powi(2);
    let mut converged = false;
    for _ in 0..MAX_SWEEPS {
        if off_diagonal_sqr(&m) <= threshold {
            converged = true;
            break;
        }
        for p in 0..n - 1 {
            for q in p + 1..n {
                rotate(&mut m, &mut v, p, q);
            }
        }
    }
    if !converged && off_diagonal_sqr(&m) > threshold {
        return Err(NumericsError::NoConvergence {
            iterations: MAX_SWEEPS,
        });
    }
    Ok(sorted(m, v))
}

fn off_diagonal_sqr(m: &ComplexMatrix) -> f64 {
    let n = m.rows();
    let mut acc = 0.0;
    for i in 0..n {
        for j in 0..n {
            if i != j {
                acc += m[(i, j)].norm_sqr();
            }
        }
    }
    acc
}

/// One Jacobi rotation annihilating `m[p][q]`.
///
/// The unitary is `J = diag(1, e^{-iφ}) · R(θ)` on the `(p, q)` plane, where the
/// phase factor makes the pivot real and `R` is the classic real rotation.
fn rotate(m: &mut ComplexMatrix, v: &mut ComplexMatrix, p: usize, q: usize) {
    let apq = m[(p, q)];
    let mag = apq.norm();
    if mag == 0.0 {
        return;
    }
    let app = m[(p, p)].re;
    let aqq = m[(q, q)].re;
    // Skip pivots that are negligible next to both diagonal entries.
    if mag < f64::EPSILON * 1e-3 * (app.abs() + aqq.abs()) {
        m[(p, q)] = Complex64::new(0.0, 0.0);
        m[(q, p)] = Complex64::new(0.0, 0.0);
        return;
    }
    let phase = apq / mag;
    let theta = (aqq - app) / (2.0 * mag);
    let t = theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt());
    let t = if theta == 0.0 { 1.0 } else { t };
    let c = 1.0 / (t * t + 1.0).sqrt();
    let s = t * c;

    let jpp = Complex64::new(c, 0.0);
    let jpq = Complex64::new(s, 0.0);
    let jqp = -phase.conj() * s;
    let jqq = phase.conj() * c;

    let n = m.rows();
    // M <- M J
    for i in 0..n {
        let mip = m[(i, p)];
        let miq = m[(i, q)];
        m[(i, p)] = mip * jpp + miq * jqp;
        m[(i, q)] = mip * jpq + miq * jqq;
    }
    // M <- J^H M
    for j in 0..n {
        let mpj = m[(p, j)];
        let mqj = m[(q, j)];
        m[(p, j)] = jpp.conj() * mpj + jqp.conj() * mqj;
        m[(q, j)] = jpq.conj() * mpj + jqq.conj() * mqj;
    }
    m[(p, q)] = Complex64::new(0.0, 0.0);
    m[(q, p)] = Complex64::new(0.0, 0.0);
    m[(p, p)] = Complex64::new(m[(p, p)].re, 0.0);
    m[(q, q)] = Complex64::new(m[(q, q)].re, 0.0);
    // V <- V J
    for i in 0..n {
        let vip = v[(i, p)];
        let viq = v[(i, q)];
        v[(i, p)] = vip * jpp + viq * jqp;
        v[(i, q)] = vip * jpq + viq * jqq;
    }
}

fn sorted(m: ComplexMatrix, v: ComplexMatrix) -> HermitianEigen {
    let n = m.rows();
    let mut order: Vec<usize> = (0..n).collect();
    // Stable sort keeps the original column order for repeated eigenvalues.
    order.sort_by(|&a, &b| m[(a, a)].re.total_cmp(&m[(b, b)].re));
    let eigenvalues = order.iter().map(|&k| m[(k, k)].re).collect();
    let eigenvectors = ComplexMatrix::from_fn(n, n, |i, j| v[(i, order[j])]);
    HermitianEigen {
        eigenvalues,
        eigenvectors,
    }
}

/// Hermitian square root `L` with `L L = D`, and its inverse.
///
/// Fails with [`NumericsError::NotPositiveDefinite`] when any eigenvalue of `D`
/// is below `floor`.
pub fn psd_sqrt_and_inverse(
    d: &ComplexMatrix,
    floor: f64,
) -> Result<(ComplexMatrix, ComplexMatrix), NumericsError> {
    let eig = hermitian_eigendecompose(d, 1e-10)?;
    let min = eig.eigenvalues.first().copied().unwrap_or(0.0);
    if min < floor || min <= 0.0 {
        return Err(NumericsError::NotPositiveDefinite {
            min_eigenvalue: min,
            floor,
        });
    }
    let l = eig.reconstruct_with(f64::sqrt);
    let l_inv = eig.reconstruct_with(|x| 1.0 / x.sqrt());
    Ok((l, l_inv))
}
