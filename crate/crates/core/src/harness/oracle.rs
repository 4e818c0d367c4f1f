//! Exhaustive grid search over small beamformers, used to certify the
//! alternating optimiser.

use std::f64::consts::{FRAC_PI_2, PI};

use num_complex::Complex64;
use rayon::prelude::*;

use super::{trial_channels, ExperimentSpec, HarnessError};
use crate::channel::ChannelSet;
use crate::numerics::{dot_h, ComplexVector};
use crate::optimizer::{alternate, OptimizerConfig};
use crate::sensing::NoiseModel;

/// Unit vectors of length `dim ≤ 2`. For `dim = 2` they are
/// `(cos a, e^{jφ} sin a)` with `a = i·(π/2)/n`, `i = 0..=n`, and
/// `φ = j·2π/n`, `j = 0..n`; the global phase is irrelevant to the SINR.
/// Grids at `n` and `4n` are nested.
fn unit_grid(dim: usize, n: usize) -> Vec<ComplexVector> {
    if dim == 1 {
        return vec![vec![Complex64::new(1.0, 0.0)]];
    }
    let mut out = Vec::new();
    for i in 0..=n {
        let a = FRAC_PI_2 * i as f64 / n as f64;
        let phases = if i == 0 || i == n { 1 } else { n };
        for j in 0..phases {
            let phi = 2.0 * PI * j as f64 / n as f64;
            out.push(vec![
                Complex64::new(a.cos(), 0.0),
                Complex64::from_polar(a.sin(), phi),
            ]);
        }
    }
    out
}

/// Best SINR over full-power `t` and unit `u` drawn from [`unit_grid`] at
/// `grid_resolution`. Only `M_t, M_r ≤ 2` is accepted.
pub fn brute_force_oracle(
    ch: &ChannelSet,
    noise: NoiseModel,
    cfg: &OptimizerConfig,
    k0: usize,
    grid_resolution: usize,
) -> Result<f64, HarnessError> {
    let (mt, mr) = (ch.tx_antennas(), ch.rx_antennas());
    if mt > 2 || mr > 2 {
        return Err(HarnessError::InvalidInput(format!(
            "grid search needs M_t, M_r ≤ 2, got {mt} and {mr}"
        )));
    }
    if grid_resolution == 0 {
        return Err(HarnessError::InvalidInput("grid resolution must be ≥ 1".into()));
    }
    if k0 >= ch.num_aircraft() {
        return Err(HarnessError::InvalidInput(format!("target {k0} out of range")));
    }
    let amp = Complex64::new(cfg.power.sqrt(), 0.0);
    let ts = unit_grid(mt, grid_resolution);
    let us = unit_grid(mr, grid_resolution);
    let best = ts
        .par_iter()
        .map(|t| {
            let t: ComplexVector = t.iter().map(|x| x * amp).collect();
            let echoes: Vec<ComplexVector> = ch
                .cascaded
                .iter()
                .map(|a| a.mul_vec(&t).expect("cascaded shape matches t"))
                .collect();
            us.iter()
                .map(|u| {
                    let mut signal = 0.0;
                    let mut rest = noise.sigma2;
                    for (k, e) in echoes.iter().enumerate() {
                        let p = dot_h(u, e).norm_sqr();
                        if k == k0 {
                            signal = p;
                        } else {
                            rest += p;
                        }
                    }
                    signal / rest
                })
                .fold(0.0, f64::max)
        })
        .reduce(|| 0.0, f64::max);
    Ok(best)
}

#[derive(Debug, Clone, PartialEq)]
pub struct OracleRow {
    pub trial: usize,
    pub seed: u64,
    pub alternating_sinr: f64,
    pub oracle_sinr: f64,
}

impl OracleRow {
    pub fn ratio(&self) -> f64 {
        self.alternating_sinr / self.oracle_sinr
    }
}

/// Joint optimisation against the grid oracle for every trial of `spec` at
/// its first sweep value.
pub fn compare_with_oracle(spec: &ExperimentSpec, grid_resolution: usize) -> Result<Vec<OracleRow>, HarnessError> {
    spec.validate()?;
    let value = spec.sweep.values()[0];
    (0..spec.trials)
        .into_par_iter()
        .map(|trial| {
            let setup = trial_channels(spec, value, trial)?;
            let ch = &setup.channels;
            let k0 = setup.geometry.target_index;
            let init = setup.opt.initial_pair(ch.tx_antennas(), ch.rx_antennas());
            let (_, trace) = alternate(ch, spec.noise, &setup.opt, k0, init)?;
            let oracle_sinr = brute_force_oracle(ch, spec.noise, &setup.opt, k0, grid_resolution)?;
            Ok(OracleRow {
                trial,
                seed: setup.seed,
                alternating_sinr: trace.final_sinr,
                oracle_sinr,
            })
        })
        .collect()
}
