//! Monte-Carlo sweeps over the experiment grid.

use std::time::Instant;

use rand::RngCore;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use super::{ExperimentSpec, HarnessError};
use crate::channel::{build_channels, ChannelSet, ScenarioGeometry, TrialStreams};
use crate::optimizer::{alternate, run_strategy, ConvergenceTrace, OptimizerConfig, Strategy};

#[derive(Debug, Clone, PartialEq)]
pub struct ResultRecord {
    pub sweep_value: f64,
    pub strategy: Strategy,
    pub trial: usize,
    pub seed: u64,
    pub final_sinr_db: f64,
    pub iterations: usize,
    pub wall_time_ms: f64,
}

/// A trial that produced no record. `stage` is `channels`, `optimizer` or
/// `record`.
#[derive(Debug, Clone, PartialEq)]
pub struct TrialFailure {
    pub sweep_value: f64,
    pub strategy: Strategy,
    pub trial: usize,
    pub seed: u64,
    pub stage: &'static str,
    pub message: String,
}

#[derive(Debug, Clone, Default)]
pub struct ExperimentRun {
    /// Sorted by `(sweep_value, strategy, trial)`.
    pub records: Vec<ResultRecord>,
    pub failures: Vec<TrialFailure>,
}

/// Seed of trial `trial`. Shared by every sweep value and strategy, so they
/// all see the same aircraft placement and fading.
pub fn trial_seed(base_seed: u64, trial: usize) -> u64 {
    let mut rng = ChaCha8Rng::seed_from_u64(base_seed);
    rng.set_stream(trial as u64);
    rng.next_u64()
}

/// Everything one trial needs at one sweep value.
#[derive(Debug, Clone)]
pub struct TrialSetup {
    pub seed: u64,
    pub streams: TrialStreams,
    pub geometry: ScenarioGeometry,
    pub channels: ChannelSet,
    pub opt: OptimizerConfig,
}

pub fn trial_channels(spec: &ExperimentSpec, sweep_value: f64, trial: usize) -> Result<TrialSetup, HarnessError> {
    let seed = trial_seed(spec.base_seed, trial);
    let (scenario, opt) = spec.sweep.apply(sweep_value, &spec.scenario, &spec.opt);
    let streams = TrialStreams::new(seed);
    let geometry = scenario.sample_geometry(&streams);
    let channels = build_channels(&geometry, &spec.prop, &streams)?;
    Ok(TrialSetup {
        seed,
        streams,
        geometry,
        channels,
        opt,
    })
}

fn run_one(spec: &ExperimentSpec, sweep_value: f64, strategy: Strategy, trial: usize) -> Result<ResultRecord, TrialFailure> {
    let fail = |seed: u64, stage: &'static str, message: String| TrialFailure {
        sweep_value,
        strategy,
        trial,
        seed,
        stage,
        message,
    };
    let setup = trial_channels(spec, sweep_value, trial)
        .map_err(|e| fail(trial_seed(spec.base_seed, trial), "channels", e.to_string()))?;
    let start = Instant::now();
    let outcome = run_strategy(
        strategy,
        &setup.channels,
        spec.noise,
        &setup.opt,
        setup.geometry.target_index,
        &mut setup.streams.strategy(),
    )
    .map_err(|e| fail(setup.seed, "optimizer", e.to_string()))?;
    let wall_time_ms = start.elapsed().as_secs_f64() * 1e3;
    let final_sinr_db = 10.0 * outcome.sinr.log10();
    if !final_sinr_db.is_finite() {
        return Err(fail(setup.seed, "record", format!("SINR {} has no finite dB value", outcome.sinr)));
    }
    Ok(ResultRecord {
        sweep_value,
        strategy,
        trial,
        seed: setup.seed,
        final_sinr_db,
        iterations: outcome.iterations,
        wall_time_ms,
    })
}

/// Runs every sweep value × strategy × trial in parallel. Failing trials land
/// in `failures` and the rest of the grid still runs.
pub fn run_experiment(spec: &ExperimentSpec) -> Result<ExperimentRun, HarnessError> {
    spec.validate()?;
    let jobs: Vec<(f64, Strategy, usize)> = spec
        .sweep
        .values()
        .into_iter()
        .flat_map(|v| {
            spec.strategies
                .iter()
                .flat_map(move |&s| (0..spec.trials).map(move |t| (v, s, t)))
        })
        .collect();
    let outcomes: Vec<_> = jobs
        .into_par_iter()
        .map(|(v, s, t)| run_one(spec, v, s, t))
        .collect();

    let mut run = ExperimentRun::default();
    for outcome in outcomes {
        match outcome {
            Ok(r) => run.records.push(r),
            Err(f) => run.failures.push(f),
        }
    }
    run.records.sort_by(|a, b| {
        a.sweep_value
            .total_cmp(&b.sweep_value)
            .then(a.strategy.cmp(&b.strategy))
            .then(a.trial.cmp(&b.trial))
    });
    Ok(run)
}

/// Joint optimisation of trial `trial` at the first sweep value.
pub fn run_trace(spec: &ExperimentSpec, trial: usize) -> Result<ConvergenceTrace, HarnessError> {
    spec.validate()?;
    let value = spec.sweep.values()[0];
    let setup = trial_channels(spec, value, trial)?;
    let (mt, mr) = (setup.channels.tx_antennas(), setup.channels.rx_antennas());
    let init = setup.opt.initial_pair(mt, mr);
    let (_, trace) = alternate(&setup.channels, spec.noise, &setup.opt, setup.geometry.target_index, init)?;
    Ok(trace)
}
