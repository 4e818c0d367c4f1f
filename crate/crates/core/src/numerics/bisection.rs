//! Bracketed bisection for a non-increasing scalar function.

use super::NumericsError;

/// Stopping rule for [`bisection`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BisectionTolerance {
    /// Bracket width at which the search stops.
    pub eps_x: f64,
    /// `|f(x)|` at which the search stops early.
    pub eps_f: f64,
    pub max_iter: usize,
}

impl Default for BisectionTolerance {
    fn default() -> Self {
        Self {
            eps_x: 1e-10,
            eps_f: 0.0,
            max_iter: 200,
        }
    }
}

/// Finds the root of a non-increasing `f` on `[lo, hi]`.
///
/// Requires `f(lo) ≥ 0 ≥ f(hi)`. Stops when the midpoint satisfies
/// `|f| < eps_f` (returning the midpoint) or when the bracket is narrower than
/// `eps_x`, in which case the upper end is returned so that `f(result) ≤ 0`.
pub fn bisection(
    mut f: impl FnMut(f64) -> f64,
    lo: f64,
    hi: f64,
    tol: BisectionTolerance,
) -> Result<f64, NumericsError> {
    if !(lo <= hi) || !lo.is_finite() || !hi.is_finite() {
        return Err(NumericsError::BracketError(format!(
            "invalid interval [{lo}, {hi}]"
        )));
    }
    let f_lo = f(lo);
    let f_hi = f(hi);
    if !(f_lo >= 0.0) || !(f_hi <= 0.0) {
        return Err(NumericsError::BracketError(format!(
            "f({lo}) = {f_lo}, f({hi}) = {f_hi}; need f(lo) ≥ 0 ≥ f(hi)"
        )));
    }
    if f_hi.abs() < tol.eps_f {
        return Ok(hi);
    }
    let (mut lo, mut hi) = (lo, hi);
    for _ in 0..tol.max_iter {
        if hi - lo < tol.eps_x {
            return Ok(hi);
        }
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            // bracket is at floating-point resolution
            return Ok(hi);
        }
        let fm = f(mid);
        if fm.abs() < tol.eps_f {
            return Ok(mid);
        }
        if fm > 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    if hi - lo < tol.eps_x {
        return Ok(hi);
    }
    Err(NumericsError::NoConvergence {
        iterations: tol.max_iter,
    })
}
