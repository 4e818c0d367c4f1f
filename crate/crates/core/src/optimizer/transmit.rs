//! Auxiliary-variable and transmit-beamformer updates for a fixed receive
//! filter.

use num_complex::Complex64;

use super::{OptimizerConfig, OptimizerError};
use crate::channel::ChannelSet;
use crate::numerics::{
    bisection, conj, dot, norm, norm_sqr, scale, solve_shifted, BisectionTolerance, ComplexMatrix,
    ComplexVector, NumericsError,
};
use crate::sensing::{project_channels, NoiseModel};

/// Bracket expansion cap (powers of two) when searching for the dual variable.
const MAX_BRACKET_STEPS: usize = 1100;

/// `ϖ = q t / (Σ_{k≠k0} |r_k t|² + σ²)`.
pub fn update_auxiliary(
    ch: &ChannelSet,
    t: &[Complex64],
    u: &[Complex64],
    noise: NoiseModel,
    k0: usize,
) -> Result<Complex64, NumericsError> {
    let p = project_channels(ch, u, k0)?;
    Ok(dot(&p.q, t) / p.interference_plus_noise(t, noise))
}

#[derive(Debug, Clone)]
pub struct TransmitUpdate {
    pub t: ComplexVector,
    /// Dual variable of the power constraint; zero when it is inactive.
    pub lambda: f64,
    /// Number of `(Ξ + λI)` solves spent on the bracket and bisection.
    pub solves: usize,
}

/// Data of the KKT system for the transmit update: `Ξ = |ϖ|² Σ r_k^H r_k` and
/// `b = ϖ q^H`, so that `t(λ) = (Ξ + λI)^{-1} b`.
#[derive(Debug, Clone)]
pub struct TransmitSystem {
    pub xi: ComplexMatrix,
    pub rhs: ComplexVector,
}

impl TransmitSystem {
    pub fn new(ch: &ChannelSet, u: &[Complex64], varpi: Complex64, k0: usize) -> Result<Self, NumericsError> {
        let p = project_channels(ch, u, k0)?;
        let mt = p.q.len();
        let w2 = varpi.norm_sqr();
        let mut xi = ComplexMatrix::zeros(mt, mt);
        for r in &p.r {
            xi.add_assign(&ComplexMatrix::outer(&conj(r), r).scale(Complex64::new(w2, 0.0)))?;
        }
        Ok(Self {
            xi,
            rhs: scale(&conj(&p.q), varpi),
        })
    }

    pub fn beam(&self, lambda: f64) -> Result<ComplexVector, NumericsError> {
        solve_shifted(&self.xi, lambda, &self.rhs)
    }

    /// `‖ϖ q^H − (Ξ + λI) t‖`.
    pub fn stationarity_residual(&self, t: &[Complex64], lambda: f64) -> Result<f64, NumericsError> {
        let lhs = self.xi.shift_diagonal(lambda).mul_vec(t)?;
        let r: ComplexVector = self.rhs.iter().zip(&lhs).map(|(b, a)| b - a).collect();
        Ok(norm(&r))
    }
}

/// Closed-form transmit update `t = ϖ (Ξ + λI)^{-1} q^H` with `λ ≥ 0` chosen so
/// that `‖t‖² ≤ P_t` holds with complementary slackness.
///
/// The unconstrained point (`λ = 0`) is only tried when `Ξ + 0·I` factors, i.e.
/// `Ξ` is numerically positive definite. Otherwise `λ` is bisected on a log
/// scale: `‖t(λ)‖` is strictly decreasing, and `‖t(λ)‖ ≤ |ϖ| ‖q‖ / λ` gives a
/// valid upper end `λ = |ϖ| ‖q‖ / √P_t` when no `lambda_max` is configured.
pub fn update_transmit(
    ch: &ChannelSet,
    u: &[Complex64],
    varpi: Complex64,
    cfg: &OptimizerConfig,
    k0: usize,
) -> Result<TransmitUpdate, OptimizerError> {
    let system = TransmitSystem::new(ch, u, varpi, k0)?;
    let power = cfg.power;
    let mt = system.rhs.len();
    let rhs_norm = norm(&system.rhs);
    if rhs_norm == 0.0 {
        return Ok(TransmitUpdate {
            t: vec![Complex64::new(0.0, 0.0); mt],
            lambda: 0.0,
            solves: 0,
        });
    }

    let mut solves = 0usize;
    let mut excess = |lambda: f64| -> f64 {
        solves += 1;
        match system.beam(lambda) {
            Ok(t) => norm_sqr(&t) - power,
            Err(_) => f64::INFINITY,
        }
    };

    if let Ok(t0) = system.beam(0.0) {
        if norm_sqr(&t0) <= power {
            return Ok(TransmitUpdate { t: t0, lambda: 0.0, solves: 1 });
        }
    }

    // The bracket lives on ln λ so that every probe is exactly exp(endpoint).
    let ln2 = std::f64::consts::LN_2;
    let mut log_hi = cfg.lambda_max.unwrap_or(rhs_norm / power.sqrt()).ln();
    let mut steps = 0;
    while excess(log_hi.exp()) > 0.0 {
        log_hi += ln2;
        steps += 1;
        if steps > MAX_BRACKET_STEPS || !log_hi.exp().is_finite() {
            return Err(OptimizerError::Numerics(NumericsError::BracketError(
                "power constraint cannot be met: lambda_max too small".into(),
            )));
        }
    }

    let log_lo = if cfg.lambda_min > 0.0 {
        let log_lo = cfg.lambda_min.ln();
        if excess(log_lo.exp()) < 0.0 {
            return Err(OptimizerError::Numerics(NumericsError::BracketError(format!(
                "‖t(lambda_min)‖² < P_t with lambda_min = {}",
                cfg.lambda_min
            ))));
        }
        log_lo
    } else {
        let mut log_lo = log_hi;
        let mut steps = 0;
        loop {
            log_lo -= ln2;
            steps += 1;
            let lambda = log_lo.exp();
            if lambda == 0.0 || steps > MAX_BRACKET_STEPS {
                // ‖t(λ)‖ stays within the budget as λ → 0: the constraint is
                // inactive up to rounding, keep the smallest probed shift.
                let lambda = (log_lo + ln2).exp();
                let t = system.beam(lambda)?;
                return Ok(TransmitUpdate { t, lambda, solves });
            }
            if excess(lambda) >= 0.0 {
                break log_lo;
            }
        }
    };

    if log_lo >= log_hi {
        let lambda = log_hi.exp();
        let t = system.beam(lambda)?;
        return Ok(TransmitUpdate { t, lambda, solves });
    }

    // Stop on the bracket width only; the returned upper end keeps ‖t‖² ≤ P_t
    // and the power tolerance is checked afterwards.
    let tol = BisectionTolerance {
        eps_x: cfg.eps1,
        eps_f: 0.0,
        max_iter: cfg.max_bisection_iters,
    };
    let log_lambda = bisection(|mu| excess(mu.exp()), log_lo, log_hi, tol)?;
    let lambda = log_lambda.exp();
    let t = system.beam(lambda)?;
    if (norm(&t) - power.sqrt()).abs() >= cfg.eps2() {
        return Err(OptimizerError::Numerics(NumericsError::NoConvergence {
            iterations: cfg.max_bisection_iters,
        }));
    }
    Ok(TransmitUpdate { t, lambda, solves })
}
