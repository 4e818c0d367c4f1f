//! JSON experiment configs.
//!
//! Positions are `[x, y, z]` triples in kilometres, the disc radius is in
//! kilometres and powers are in watts. Unknown keys are rejected at every
//! level.

use std::collections::BTreeSet;
use std::path::Path;

use serde::{Deserialize, Serialize};

use super::HarnessError;
use crate::channel::{sample_aircraft_positions, Position3D, PropagationParams, ScenarioGeometry, TrialStreams};
use crate::optimizer::{OptimizerConfig, Strategy};
use crate::sensing::NoiseModel;

/// Scenario before aircraft placement.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScenarioTemplate {
    /// km
    pub satellite: [f64; 3],
    /// km
    #[serde(default)]
    pub bs: [f64; 3],
    /// Centre of the aircraft disc, km.
    #[serde(default = "default_center")]
    pub center: [f64; 3],
    /// Disc radius, km.
    #[serde(default = "default_radius")]
    pub radius: f64,
    #[serde(default = "default_num_aircraft")]
    pub num_aircraft: usize,
    #[serde(default = "default_tx_antennas")]
    pub tx_antennas: usize,
    #[serde(default = "default_rx_antennas")]
    pub rx_antennas: usize,
    /// Element spacing over wavelength.
    #[serde(default = "default_spacing")]
    pub spacing_ratio: f64,
}

fn default_center() -> [f64; 3] {
    [20.0, 20.0, 10.0]
}

fn default_radius() -> f64 {
    10.0
}

fn default_num_aircraft() -> usize {
    4
}

fn default_tx_antennas() -> usize {
    8
}

fn default_rx_antennas() -> usize {
    6
}

fn default_spacing() -> f64 {
    0.5
}

fn km([x, y, z]: [f64; 3]) -> Position3D {
    Position3D::from_km(x, y, z)
}

impl ScenarioTemplate {
    /// Places the aircraft with `streams.placement()` and targets the first.
    pub fn sample_geometry(&self, streams: &TrialStreams) -> ScenarioGeometry {
        let aircraft = sample_aircraft_positions(
            km(self.center),
            self.radius * 1e3,
            self.num_aircraft,
            &mut streams.placement(),
        );
        ScenarioGeometry {
            satellite: km(self.satellite),
            bs: km(self.bs),
            aircraft,
            target_index: 0,
            tx_antennas: self.tx_antennas,
            rx_antennas: self.rx_antennas,
            spacing_ratio: self.spacing_ratio,
        }
    }

    fn validate(&self) -> Result<(), HarnessError> {
        for (key, p) in [("scenario.satellite", self.satellite), ("scenario.bs", self.bs), ("scenario.center", self.center)] {
            if p.iter().any(|v| !v.is_finite()) {
                return Err(HarnessError::config(key, "coordinates must be finite"));
            }
        }
        if self.bs[2] < 0.0 || self.center[2] < 0.0 {
            return Err(HarnessError::config("scenario", "ground and air nodes need z ≥ 0"));
        }
        if !(self.radius >= 0.0) || !self.radius.is_finite() {
            return Err(HarnessError::config(
                "scenario.radius",
                format!("must be finite and ≥ 0, got {}", self.radius),
            ));
        }
        let counts = [
            ("scenario.num_aircraft", self.num_aircraft),
            ("scenario.tx_antennas", self.tx_antennas),
            ("scenario.rx_antennas", self.rx_antennas),
        ];
        for (key, n) in counts {
            if n == 0 {
                return Err(HarnessError::config(key, "must be ≥ 1"));
            }
        }
        if !(self.spacing_ratio > 0.0) || !self.spacing_ratio.is_finite() {
            return Err(HarnessError::config("scenario.spacing_ratio", "must be positive"));
        }
        Ok(())
    }
}

/// The swept quantity. Altitude is in km and moves only the satellite's z;
/// antennas sets `M_t`; power is in watts.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize, Default)]
#[serde(rename_all = "snake_case", deny_unknown_fields)]
pub enum Sweep {
    #[default]
    None,
    Altitude(Vec<f64>),
    Antennas(Vec<usize>),
    Power(Vec<f64>),
}

impl Sweep {
    /// Values written to the `sweep_value` column. `None` yields a single `0`.
    pub fn values(&self) -> Vec<f64> {
        match self {
            Sweep::None => vec![0.0],
            Sweep::Altitude(v) | Sweep::Power(v) => v.clone(),
            Sweep::Antennas(v) => v.iter().map(|&n| n as f64).collect(),
        }
    }

    /// Scenario and optimiser settings at one sweep value.
    pub fn apply(&self, value: f64, scenario: &ScenarioTemplate, opt: &OptimizerConfig) -> (ScenarioTemplate, OptimizerConfig) {
        let mut scenario = scenario.clone();
        let mut opt = *opt;
        match self {
            Sweep::None => {}
            Sweep::Altitude(_) => scenario.satellite[2] = value,
            Sweep::Antennas(_) => scenario.tx_antennas = value as usize,
            Sweep::Power(_) => opt.power = value,
        }
        (scenario, opt)
    }

    fn validate(&self) -> Result<(), HarnessError> {
        let key = match self {
            Sweep::None => return Ok(()),
            Sweep::Altitude(_) => "sweep.altitude",
            Sweep::Antennas(_) => "sweep.antennas",
            Sweep::Power(_) => "sweep.power",
        };
        let values = self.values();
        if values.is_empty() {
            return Err(HarnessError::config(key, "sweep list is empty"));
        }
        if values.iter().any(|v| !(*v > 0.0) || !v.is_finite()) {
            return Err(HarnessError::config(key, "sweep values must be positive"));
        }
        if values.windows(2).any(|w| w[1] <= w[0]) {
            return Err(HarnessError::config(key, "sweep values must be strictly increasing"));
        }
        Ok(())
    }
}

fn default_strategies() -> Vec<Strategy> {
    Strategy::ALL.to_vec()
}

fn default_trials() -> usize {
    1
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentSpec {
    pub scenario: ScenarioTemplate,
    #[serde(default)]
    pub prop: PropagationParams,
    #[serde(default)]
    pub noise: NoiseModel,
    #[serde(default)]
    pub opt: OptimizerConfig,
    #[serde(default)]
    pub sweep: Sweep,
    #[serde(default = "default_strategies")]
    pub strategies: Vec<Strategy>,
    #[serde(default = "default_trials")]
    pub trials: usize,
    #[serde(default)]
    pub base_seed: u64,
}

impl ExperimentSpec {
    pub fn validate(&self) -> Result<(), HarnessError> {
        self.scenario.validate()?;
        self.prop
            .validate()
            .map_err(|e| HarnessError::config("prop", e.to_string()))?;
        NoiseModel::new(self.noise.sigma2).map_err(|e| HarnessError::config("noise.sigma2", e.to_string()))?;
        self.opt
            .validate()
            .map_err(|e| HarnessError::config("opt", e.to_string()))?;
        self.sweep.validate()?;
        if self.trials == 0 {
            return Err(HarnessError::config("trials", "must be ≥ 1"));
        }
        if self.strategies.is_empty() {
            return Err(HarnessError::config("strategies", "at least one strategy is required"));
        }
        if self.strategies.iter().collect::<BTreeSet<_>>().len() != self.strategies.len() {
            return Err(HarnessError::config("strategies", "duplicate strategy"));
        }
        Ok(())
    }
}

pub fn parse_config(path: impl AsRef<Path>) -> Result<ExperimentSpec, HarnessError> {
    let path = path.as_ref();
    let text = std::fs::read_to_string(path).map_err(|e| HarnessError::io(path, e))?;
    parse_config_str(&text)
}

pub fn parse_config_str(text: &str) -> Result<ExperimentSpec, HarnessError> {
    let mut de = serde_json::Deserializer::from_str(text);
    let spec: ExperimentSpec = serde_path_to_error::deserialize(&mut de).map_err(|e| {
        let key = e.path().to_string();
        HarnessError::config(key, e.into_inner().to_string())
    })?;
    de.end().map_err(|e| HarnessError::config(".", e.to_string()))?;
    spec.validate()?;
    Ok(spec)
}
