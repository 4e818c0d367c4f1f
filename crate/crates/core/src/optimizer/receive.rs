//! Receive filter as the maximiser of the generalised Rayleigh quotient
//! `u^H N u / u^H D u`.

use num_complex::Complex64;

use crate::numerics::{
    hermitian_eigendecompose, normalized, phase_normalize, psd_sqrt_and_inverse, ComplexVector,
    NumericsError,
};
use crate::sensing::SinrParts;

/// Whitens with `L = D^{1/2}`, takes the top eigenvector `p` of `L^{-1} N L^{-1}`
/// and returns `u = L^{-1} p / ‖L^{-1} p‖`.
///
/// Ties for the top eigenvalue go to the lowest index; the result is rotated so
/// its largest entry is real positive. `N = 0` yields the first basis vector.
pub fn update_receive(parts: &SinrParts, pd_floor: f64) -> Result<ComplexVector, NumericsError> {
    let mr = parts.d.rows();
    if parts.n.rows() != mr || !parts.n.is_square() || !parts.d.is_square() {
        return Err(NumericsError::InvalidInput("N and D must be square and equal-sized".into()));
    }
    let (_, l_inv) = psd_sqrt_and_inverse(&parts.d, pd_floor)?;
    if parts.n.max_abs() == 0.0 {
        let mut e = vec![Complex64::new(0.0, 0.0); mr];
        e[0] = Complex64::new(1.0, 0.0);
        return Ok(e);
    }
    let whitened = l_inv.matmul(&parts.n)?.matmul(&l_inv)?;
    let eig = hermitian_eigendecompose(&whitened, 1e-8)?;
    let top = *eig.eigenvalues.last().expect("non-empty spectrum");
    let tie = 1e-12 * top.abs().max(f64::MIN_POSITIVE);
    let pick = eig
        .eigenvalues
        .iter()
        .position(|&l| top - l <= tie)
        .expect("top eigenvalue present");
    let p = eig.eigenvector(pick);
    let mut u = normalized(&l_inv.mul_vec(&p)?)
        .ok_or_else(|| NumericsError::InvalidInput("whitened eigenvector vanished".into()))?;
    phase_normalize(&mut u);
    Ok(u)
}
