//! Alternating maximisation of the target echo SINR over the satellite
//! transmit beamformer `t` and the ground receive filter `u`.
//!
//! Each outer iteration runs three closed-form steps:
//!
//! 1. auxiliary weight `ϖ` of the quadratic transform ([`update_auxiliary`]),
//! 2. transmit beam from the KKT system with a bisected dual variable
//!    ([`update_transmit`]),
//! 3. receive filter as a generalised Rayleigh quotient maximiser
//!    ([`update_receive`]).
//!
//! None of the steps can lower the SINR, so the per-iteration trace is
//! non-decreasing. Per iteration the transmit step costs `O(I_λ M_t³)` (one
//! Cholesky factorisation per bisection probe) and the receive step
//! `O(M_r³)` per Jacobi sweep.

mod receive;
mod strategy;
mod transmit;

pub use receive::update_receive;
pub use strategy::{random_pair, run_strategy, Strategy, StrategyOutcome};
pub use transmit::{update_auxiliary, update_transmit, TransmitSystem, TransmitUpdate};

use num_complex::Complex64;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::channel::ChannelSet;
use crate::numerics::{NumericsError, DEFAULT_PD_FLOOR};
use crate::sensing::{build_sinr_parts, pair_sinr, BeamformerPair, NoiseModel};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum OptimizerError {
    #[error(transparent)]
    Numerics(#[from] NumericsError),
    #[error("invalid optimizer configuration: {0}")]
    InvalidConfig(String),
    #[error("initial point violates the constraints: {0}")]
    InfeasibleInit(String),
}

/// Starting point of the alternating loop.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum Initialization {
    /// `t = √(P_t/M_t)·1`, `u = e₁`.
    #[default]
    Uniform,
    /// Random full-power `t` and random unit `u` from the given seed.
    Random { seed: u64 },
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct OptimizerConfig {
    /// Transmit power budget, watts.
    pub power: f64,
    /// Bisection stops once the bracket on `ln λ` is narrower than this.
    pub eps1: f64,
    /// Tolerance on `‖t‖ − √P_t`; `None` means `1e-8 · √P_t`.
    pub eps2: Option<f64>,
    /// Relative SINR change that ends the outer loop.
    pub eps3: f64,
    pub lambda_min: f64,
    /// Upper end of the dual bracket; `None` uses `|ϖ| ‖q‖ / √P_t`. Doubled
    /// until the bracket is valid.
    pub lambda_max: Option<f64>,
    pub max_outer_iters: usize,
    pub max_bisection_iters: usize,
    /// Smallest eigenvalue accepted for the interference-plus-noise matrix.
    pub pd_floor: f64,
    pub init: Initialization,
}

impl Default for OptimizerConfig {
    fn default() -> Self {
        Self {
            power: 1.0,
            eps1: 1e-10,
            eps2: None,
            eps3: 1e-6,
            lambda_min: 0.0,
            lambda_max: None,
            max_outer_iters: 50,
            max_bisection_iters: 200,
            pd_floor: DEFAULT_PD_FLOOR,
            init: Initialization::Uniform,
        }
    }
}

impl OptimizerConfig {
    pub fn eps2(&self) -> f64 {
        self.eps2.unwrap_or(1e-8 * self.power.sqrt())
    }

    pub fn validate(&self) -> Result<(), OptimizerError> {
        let bad = |what: &str| Err(OptimizerError::InvalidConfig(what.to_string()));
        if !(self.power > 0.0) || !self.power.is_finite() {
            return bad("power must be positive");
        }
        if !(self.eps1 > 0.0) || !(self.eps2() > 0.0) || !(self.eps3 > 0.0) {
            return bad("tolerances must be positive");
        }
        if !(self.lambda_min >= 0.0) {
            return bad("lambda_min must be ≥ 0");
        }
        if let Some(hi) = self.lambda_max {
            if !(hi > self.lambda_min) {
                return bad("lambda_max must exceed lambda_min");
            }
        }
        if self.max_outer_iters == 0 || self.max_bisection_iters == 0 {
            return bad("iteration caps must be ≥ 1");
        }
        if !(self.pd_floor >= 0.0) {
            return bad("pd_floor must be ≥ 0");
        }
        Ok(())
    }

    /// Starting pair for `M_t` transmit and `M_r` receive antennas.
    pub fn initial_pair(&self, mt: usize, mr: usize) -> BeamformerPair {
        match self.init {
            Initialization::Uniform => {
                let mut u = vec![Complex64::new(0.0, 0.0); mr];
                u[0] = Complex64::new(1.0, 0.0);
                BeamformerPair {
                    t: vec![Complex64::new((self.power / mt as f64).sqrt(), 0.0); mt],
                    u,
                }
            }
            Initialization::Random { seed } => {
                random_pair(&mut ChaCha8Rng::seed_from_u64(seed), mt, mr, self.power)
            }
        }
    }
}

/// Mutable state of one alternating run.
#[derive(Debug, Clone)]
pub struct OptimizerState {
    pub pair: BeamformerPair,
    pub varpi: Complex64,
    pub lambda_dual: f64,
    pub iteration: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Termination {
    ToleranceMet,
    MaxIters,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ConvergenceTrace {
    /// SINR after each outer iteration (linear).
    pub sinr_per_iteration: Vec<f64>,
    /// Dual variable of the power constraint at each iteration.
    pub lambda_per_iteration: Vec<f64>,
    /// SINR of the starting point.
    pub initial_sinr: f64,
    pub termination: Termination,
    pub final_sinr: f64,
}

impl ConvergenceTrace {
    pub fn iterations(&self) -> usize {
        self.sinr_per_iteration.len()
    }

    /// True when no entry drops below its predecessor (starting point
    /// included) by more than `slack` relative.
    pub fn is_non_decreasing(&self, slack: f64) -> bool {
        std::iter::once(&self.initial_sinr)
            .chain(&self.sinr_per_iteration)
            .collect::<Vec<_>>()
            .windows(2)
            .all(|w| *w[1] >= *w[0] - slack * w[0].abs())
    }
}

/// Joint alternating optimisation from `init`.
pub fn alternate(
    ch: &ChannelSet,
    noise: NoiseModel,
    cfg: &OptimizerConfig,
    k0: usize,
    init: BeamformerPair,
) -> Result<(BeamformerPair, ConvergenceTrace), OptimizerError> {
    run_loop(ch, noise, cfg, k0, init, true)
}

/// Alternating loop; with `update_filter = false` the receive filter stays at
/// its initial value and only `ϖ` and `t` are iterated.
pub(crate) fn run_loop(
    ch: &ChannelSet,
    noise: NoiseModel,
    cfg: &OptimizerConfig,
    k0: usize,
    init: BeamformerPair,
    update_filter: bool,
) -> Result<(BeamformerPair, ConvergenceTrace), OptimizerError> {
    cfg.validate()?;
    if init.t.len() != ch.tx_antennas() || init.u.len() != ch.rx_antennas() {
        return Err(OptimizerError::InfeasibleInit(format!(
            "expected t of length {} and u of length {}",
            ch.tx_antennas(),
            ch.rx_antennas()
        )));
    }
    if !init.is_feasible(cfg.power) {
        return Err(OptimizerError::InfeasibleInit(
            "need ‖t‖² ≤ P_t and ‖u‖ = 1".into(),
        ));
    }

    let initial_sinr = pair_sinr(ch, &init, noise, k0)?;
    let mut state = OptimizerState {
        pair: init,
        varpi: Complex64::new(0.0, 0.0),
        lambda_dual: 0.0,
        iteration: 0,
    };
    let mut previous = initial_sinr;
    let mut sinrs = Vec::new();
    let mut lambdas = Vec::new();
    let mut termination = Termination::MaxIters;

    while state.iteration < cfg.max_outer_iters {
        state.varpi = update_auxiliary(ch, &state.pair.t, &state.pair.u, noise, k0)?;
        let tx = update_transmit(ch, &state.pair.u, state.varpi, cfg, k0)?;
        state.pair.t = tx.t;
        state.lambda_dual = tx.lambda;
        let parts = build_sinr_parts(ch, &state.pair.t, noise, k0)?;
        if update_filter {
            state.pair.u = update_receive(&parts, cfg.pd_floor)?;
        }
        state.iteration += 1;
        let current = crate::sensing::sinr(&parts, &state.pair.u)?;
        sinrs.push(current);
        lambdas.push(tx.lambda);
        let change = (current - previous).abs();
        previous = current;
        if change == 0.0 || change < cfg.eps3 * current.abs() {
            termination = Termination::ToleranceMet;
            break;
        }
    }

    let trace = ConvergenceTrace {
        final_sinr: previous,
        sinr_per_iteration: sinrs,
        lambda_per_iteration: lambdas,
        initial_sinr,
        termination,
    };
    Ok((state.pair, trace))
}
