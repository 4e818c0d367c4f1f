//! The joint optimiser and the comparison strategies.

use std::fmt;
use std::str::FromStr;

use num_complex::Complex64;
use rand::Rng;
use serde::{Deserialize, Serialize};

use super::{alternate, receive::update_receive, run_loop, ConvergenceTrace, OptimizerConfig, OptimizerError};
use crate::channel::{complex_gaussian, ChannelSet};
use crate::numerics::{normalized, scale, ComplexVector};
use crate::sensing::{build_sinr_parts, pair_sinr, BeamformerPair, NoiseModel};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Strategy {
    /// Alternating optimisation of both `t` and `u`.
    Joint,
    /// Random full-power `t`, optimal `u`.
    ReceiveOnly,
    /// Random unit `u`, `t` optimised by the `ϖ`/`t` iteration.
    TransmitOnly,
    /// Random `t` at full power and random unit `u`.
    Random,
    /// Monostatic: the satellite array transmits and receives.
    Transceiving,
}

impl Strategy {
    pub const ALL: [Strategy; 5] = [
        Strategy::Joint,
        Strategy::ReceiveOnly,
        Strategy::TransmitOnly,
        Strategy::Random,
        Strategy::Transceiving,
    ];

    pub fn name(&self) -> &'static str {
        match self {
            Strategy::Joint => "joint",
            Strategy::ReceiveOnly => "receive_only",
            Strategy::TransmitOnly => "transmit_only",
            Strategy::Random => "random",
            Strategy::Transceiving => "transceiving",
        }
    }
}

impl fmt::Display for Strategy {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Strategy {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Strategy::ALL
            .into_iter()
            .find(|st| st.name() == s.trim())
            .ok_or_else(|| {
                format!(
                    "unknown strategy `{s}` (expected one of {})",
                    Strategy::ALL.map(|s| s.name()).join(", ")
                )
            })
    }
}

#[derive(Debug, Clone)]
pub struct StrategyOutcome {
    pub pair: BeamformerPair,
    pub sinr: f64,
    pub iterations: usize,
    /// Present for the iterative strategies.
    pub trace: Option<ConvergenceTrace>,
}

/// Random `t` with `‖t‖² = power` and random unit `u`, both isotropic. `t` is
/// drawn first so strategies sharing a stream see the same transmit beam.
pub fn random_pair<R: Rng + ?Sized>(rng: &mut R, mt: usize, mr: usize, power: f64) -> BeamformerPair {
    let t = random_direction(rng, mt);
    let u = random_direction(rng, mr);
    BeamformerPair {
        t: scale(&t, Complex64::new(power.sqrt(), 0.0)),
        u,
    }
}

fn random_direction<R: Rng + ?Sized>(rng: &mut R, n: usize) -> ComplexVector {
    loop {
        let v: ComplexVector = (0..n).map(|_| complex_gaussian(rng)).collect();
        if let Some(v) = normalized(&v) {
            return v;
        }
    }
}

/// Runs one strategy on a channel realisation. Randomised strategies draw
/// `(t, u)` from `rng` via [`random_pair`].
pub fn run_strategy<R: Rng + ?Sized>(
    strategy: Strategy,
    ch: &ChannelSet,
    noise: NoiseModel,
    cfg: &OptimizerConfig,
    k0: usize,
    rng: &mut R,
) -> Result<StrategyOutcome, OptimizerError> {
    cfg.validate()?;
    let (mt, mr) = (ch.tx_antennas(), ch.rx_antennas());
    let from_trace = |(pair, trace): (BeamformerPair, ConvergenceTrace)| StrategyOutcome {
        sinr: trace.final_sinr,
        iterations: trace.iterations(),
        trace: Some(trace),
        pair,
    };
    match strategy {
        Strategy::Joint => Ok(from_trace(alternate(ch, noise, cfg, k0, cfg.initial_pair(mt, mr))?)),
        Strategy::Transceiving => {
            let mono = ch.monostatic();
            let init = cfg.initial_pair(mt, mt);
            Ok(from_trace(alternate(&mono, noise, cfg, k0, init)?))
        }
        Strategy::ReceiveOnly => {
            let random = random_pair(rng, mt, mr, cfg.power);
            let parts = build_sinr_parts(ch, &random.t, noise, k0)?;
            let u = update_receive(&parts, cfg.pd_floor)?;
            let sinr = crate::sensing::sinr(&parts, &u)?;
            Ok(StrategyOutcome {
                pair: BeamformerPair { t: random.t, u },
                sinr,
                iterations: 1,
                trace: None,
            })
        }
        Strategy::TransmitOnly => {
            let random = random_pair(rng, mt, mr, cfg.power);
            let init = BeamformerPair {
                t: cfg.initial_pair(mt, mr).t,
                u: random.u,
            };
            Ok(from_trace(run_loop(ch, noise, cfg, k0, init, false)?))
        }
        Strategy::Random => {
            let pair = random_pair(rng, mt, mr, cfg.power);
            let sinr = pair_sinr(ch, &pair, noise, k0)?;
            Ok(StrategyOutcome {
                pair,
                sinr,
                iterations: 1,
                trace: None,
            })
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::channel::{build_channels, sample_aircraft_positions, Position3D, PropagationParams, ScenarioGeometry, TrialStreams};

    fn scenario(seed: u64) -> ChannelSet {
        let streams = TrialStreams::new(seed);
        let geom = ScenarioGeometry {
            satellite: Position3D::from_km(-10.0, 20.0, 300.0),
            bs: Position3D::new(0.0, 0.0, 0.0),
            aircraft: sample_aircraft_positions(Position3D::from_km(20.0, 20.0, 10.0), 10e3, 4, &mut streams.placement()),
            target_index: 0,
            tx_antennas: 8,
            rx_antennas: 4,
            spacing_ratio: 0.5,
        };
        build_channels(&geom, &PropagationParams::default(), &streams).unwrap()
    }

    #[test]
    fn names_round_trip() {
        for s in Strategy::ALL {
            assert_eq!(s.name().parse::<Strategy>().unwrap(), s);
        }
        assert!("bogus".parse::<Strategy>().is_err());
    }

    #[test]
    fn random_strategy_is_deterministic() {
        let ch = scenario(1);
        let cfg = OptimizerConfig::default();
        let noise = NoiseModel::default();
        let a = run_strategy(Strategy::Random, &ch, noise, &cfg, 0, &mut TrialStreams::new(3).strategy()).unwrap();
        let b = run_strategy(Strategy::Random, &ch, noise, &cfg, 0, &mut TrialStreams::new(3).strategy()).unwrap();
        assert_eq!(a.sinr, b.sinr);
        assert!(a.pair.is_feasible(cfg.power));
    }

    #[test]
    fn single_sided_strategies_beat_their_random_start() {
        let cfg = OptimizerConfig::default();
        let noise = NoiseModel::default();
        for seed in 0..5 {
            let ch = scenario(seed);
            let streams = TrialStreams::new(seed);
            let random = run_strategy(Strategy::Random, &ch, noise, &cfg, 0, &mut streams.strategy()).unwrap();
            let rx = run_strategy(Strategy::ReceiveOnly, &ch, noise, &cfg, 0, &mut streams.strategy()).unwrap();
            let tx = run_strategy(Strategy::TransmitOnly, &ch, noise, &cfg, 0, &mut streams.strategy()).unwrap();
            assert_eq!(rx.pair.t, random.pair.t);
            assert_eq!(tx.pair.u, random.pair.u);
            assert!(rx.sinr >= random.sinr * (1.0 - 1e-12));
            assert!(tx.sinr >= random.sinr * (1.0 - 1e-9));
            assert!(rx.pair.is_feasible(cfg.power) && tx.pair.is_feasible(cfg.power));
        }
    }

    #[test]
    fn transceiving_uses_satellite_array_on_receive() {
        let ch = scenario(2);
        let cfg = OptimizerConfig::default();
        let out = run_strategy(Strategy::Transceiving, &ch, NoiseModel::default(), &cfg, 0, &mut TrialStreams::new(0).strategy()).unwrap();
        assert_eq!(out.pair.u.len(), ch.tx_antennas());
        assert!(out.sinr > 0.0);
    }
}
