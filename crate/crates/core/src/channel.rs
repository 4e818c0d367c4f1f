//! Scenario geometry and channel synthesis for the satellite → aircraft →
//! ground-station links.
//!
//! Both antenna arrays are uniform linear arrays laid along the global x-axis,
//! so the angle that drives the steering phase is the direction cosine along x
//! of the propagation path. The satellite-to-aircraft hop is a deterministic
//! steering vector; the aircraft-to-ground hop is Rician with an i.i.d.
//! circular Gaussian scattered part.
//!
//! Randomness comes from [`TrialStreams`]: every consumer (aircraft placement,
//! fading of aircraft `k`, strategy initialisation) draws from its own ChaCha
//! stream, so results do not depend on evaluation order.

use std::f64::consts::PI;

use num_complex::Complex64;
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::numerics::{norm, ComplexMatrix, ComplexVector};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ChannelError {
    #[error("degenerate geometry: {0}")]
    DegenerateGeometry(String),
    #[error("invalid scenario: {0}")]
    InvalidInput(String),
}

/// A point in metres.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Position3D {
    pub x: f64,
    pub y: f64,
    pub z: f64,
}

impl Position3D {
    pub const fn new(x: f64, y: f64, z: f64) -> Self {
        Self { x, y, z }
    }

    pub fn from_km(x: f64, y: f64, z: f64) -> Self {
        Self::new(x * 1e3, y * 1e3, z * 1e3)
    }

    pub fn distance_to(&self, other: &Self) -> f64 {
        ((other.x - self.x).powi(2) + (other.y - self.y).powi(2) + (other.z - self.z).powi(2)).sqrt()
    }

    pub fn horizontal_distance_to(&self, other: &Self) -> f64 {
        (other.x - self.x).hypot(other.y - self.y)
    }

    fn is_finite(&self) -> bool {
        self.x.is_finite() && self.y.is_finite() && self.z.is_finite()
    }
}

/// Node positions and array sizes for one channel realisation.
#[derive(Debug, Clone, PartialEq)]
pub struct ScenarioGeometry {
    pub satellite: Position3D,
    pub bs: Position3D,
    pub aircraft: Vec<Position3D>,
    pub target_index: usize,
    pub tx_antennas: usize,
    pub rx_antennas: usize,
    /// Element spacing over wavelength.
    pub spacing_ratio: f64,
}

impl ScenarioGeometry {
    pub fn num_aircraft(&self) -> usize {
        self.aircraft.len()
    }

    pub fn validate(&self) -> Result<(), ChannelError> {
        let k = self.aircraft.len();
        if k == 0 {
            return Err(ChannelError::InvalidInput("at least one aircraft is required".into()));
        }
        if self.target_index >= k {
            return Err(ChannelError::InvalidInput(format!(
                "target index {} out of range for {k} aircraft",
                self.target_index
            )));
        }
        if self.tx_antennas == 0 || self.rx_antennas == 0 {
            return Err(ChannelError::InvalidInput("antenna counts must be ≥ 1".into()));
        }
        if !(self.spacing_ratio > 0.0) || !self.spacing_ratio.is_finite() {
            return Err(ChannelError::InvalidInput(format!(
                "spacing ratio must be positive, got {}",
                self.spacing_ratio
            )));
        }
        let nodes = [self.satellite, self.bs];
        for p in nodes.iter().chain(&self.aircraft) {
            if !p.is_finite() {
                return Err(ChannelError::InvalidInput(format!("non-finite position {p:?}")));
            }
        }
        if self.bs.z < 0.0 || self.aircraft.iter().any(|p| p.z < 0.0) {
            return Err(ChannelError::InvalidInput(
                "ground and air nodes must have z ≥ 0".into(),
            ));
        }
        for (i, a) in self.aircraft.iter().enumerate() {
            if a == &self.satellite || a == &self.bs {
                return Err(ChannelError::DegenerateGeometry(format!(
                    "aircraft {i} coincides with the satellite or the base station"
                )));
            }
        }
        Ok(())
    }
}

/// Large-scale and small-scale propagation parameters.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct PropagationParams {
    /// Linear power gain at the reference distance, satellite → aircraft.
    pub beta0_s2a: f64,
    pub alpha_s2a: f64,
    /// Linear power gain at the reference distance, aircraft → ground.
    pub beta0_a2g: f64,
    pub alpha_a2g: f64,
    /// Linear Rician factor of the aircraft → ground link.
    pub rician_k: f64,
    /// Drop the scattered component entirely (the infinite Rician factor limit).
    pub los_only: bool,
    /// Metres.
    pub reference_distance: f64,
}

impl Default for PropagationParams {
    fn default() -> Self {
        Self {
            beta0_s2a: 1.0,
            alpha_s2a: 2.0,
            beta0_a2g: 1.0,
            alpha_a2g: 2.2,
            rician_k: 10.0,
            los_only: false,
            reference_distance: 1.0,
        }
    }
}

impl PropagationParams {
    pub fn validate(&self) -> Result<(), ChannelError> {
        let positive = [
            ("beta0_s2a", self.beta0_s2a),
            ("alpha_s2a", self.alpha_s2a),
            ("beta0_a2g", self.beta0_a2g),
            ("alpha_a2g", self.alpha_a2g),
            ("reference_distance", self.reference_distance),
        ];
        for (name, v) in positive {
            if !(v > 0.0) || !v.is_finite() {
                return Err(ChannelError::InvalidInput(format!("{name} must be positive, got {v}")));
            }
        }
        if !(self.rician_k >= 0.0) || !self.rician_k.is_finite() {
            return Err(ChannelError::InvalidInput(format!(
                "rician_k must be finite and ≥ 0, got {}",
                self.rician_k
            )));
        }
        Ok(())
    }

    pub fn s2a_gain(&self, distance: f64) -> f64 {
        path_gain(self.beta0_s2a, self.alpha_s2a, distance / self.reference_distance)
    }

    pub fn a2g_gain(&self, distance: f64) -> f64 {
        path_gain(self.beta0_a2g, self.alpha_a2g, distance / self.reference_distance)
    }
}

fn path_gain(beta0: f64, alpha: f64, relative_distance: f64) -> f64 {
    beta0 * relative_distance.powf(-alpha)
}

/// Per-aircraft channels. `h_s[k]` is a row vector (length `M_t`), `h_b[k]` a
/// column vector (length `M_r`), `cascaded[k] = h_b[k] h_s[k]`.
#[derive(Debug, Clone, PartialEq)]
pub struct ChannelSet {
    pub h_s: Vec<ComplexVector>,
    pub h_b: Vec<ComplexVector>,
    pub cascaded: Vec<ComplexMatrix>,
}

impl ChannelSet {
    /// Assembles the set from its two hops.
    pub fn from_links(h_s: Vec<ComplexVector>, h_b: Vec<ComplexVector>) -> Result<Self, ChannelError> {
        if h_s.is_empty() || h_s.len() != h_b.len() {
            return Err(ChannelError::InvalidInput(format!(
                "{} transmit links vs {} receive links",
                h_s.len(),
                h_b.len()
            )));
        }
        let (mt, mr) = (h_s[0].len(), h_b[0].len());
        if h_s.iter().any(|h| h.len() != mt) || h_b.iter().any(|h| h.len() != mr) {
            return Err(ChannelError::InvalidInput("ragged channel vectors".into()));
        }
        let cascaded = h_s
            .iter()
            .zip(&h_b)
            .map(|(s, b)| ComplexMatrix::outer(b, s))
            .collect();
        Ok(Self { h_s, h_b, cascaded })
    }

    pub fn num_aircraft(&self) -> usize {
        self.h_s.len()
    }

    pub fn tx_antennas(&self) -> usize {
        self.h_s[0].len()
    }

    pub fn rx_antennas(&self) -> usize {
        self.h_b[0].len()
    }

    /// Monostatic counterpart: the satellite array also receives, so the return
    /// hop of aircraft `k` is `h_s[k]^T`.
    pub fn monostatic(&self) -> Self {
        let h_b = self.h_s.clone();
        Self::from_links(self.h_s.clone(), h_b).expect("shapes already validated")
    }
}

/// Distance from `source` to `dest` and the direction cosine of that path
/// along the array (x) axis.
pub fn direction_cosine(source: &Position3D, dest: &Position3D) -> Result<(f64, f64), ChannelError> {
    let d = source.distance_to(dest);
    if !(d > 0.0) {
        return Err(ChannelError::DegenerateGeometry(format!(
            "coincident points {source:?} and {dest:?}"
        )));
    }
    let sin_theta = ((dest.x - source.x) / d).clamp(-1.0, 1.0);
    Ok((d, sin_theta))
}

/// `e^{-j (m-1) 2π (d/λ) sin θ}` for `m = 1..=n`.
pub fn steering_vector(n: usize, spacing_ratio: f64, sin_theta: f64) -> ComplexVector {
    let step = -2.0 * PI * spacing_ratio * sin_theta;
    (0..n).map(|m| Complex64::from_polar(1.0, step * m as f64)).collect()
}

/// Satellite → aircraft `k` row vector.
pub fn s2a_channel(
    geom: &ScenarioGeometry,
    prop: &PropagationParams,
    k: usize,
) -> Result<ComplexVector, ChannelError> {
    let aircraft = aircraft(geom, k)?;
    let (d, sin_theta) = direction_cosine(&geom.satellite, aircraft)?;
    let amp = prop.s2a_gain(d).sqrt();
    Ok(steering_vector(geom.tx_antennas, geom.spacing_ratio, sin_theta)
        .into_iter()
        .map(|z| z * amp)
        .collect())
}

/// Aircraft `k` → base-station column vector with Rician fading.
pub fn a2g_channel<R: Rng + ?Sized>(
    geom: &ScenarioGeometry,
    prop: &PropagationParams,
    k: usize,
    rng: &mut R,
) -> Result<ComplexVector, ChannelError> {
    let aircraft = aircraft(geom, k)?;
    let (d, sin_theta) = direction_cosine(aircraft, &geom.bs)?;
    let amp = prop.a2g_gain(d).sqrt();
    let los = steering_vector(geom.rx_antennas, geom.spacing_ratio, sin_theta);
    if prop.los_only {
        return Ok(los.into_iter().map(|z| z * amp).collect());
    }
    let kf = prop.rician_k;
    let w_los = (kf / (kf + 1.0)).sqrt();
    let w_nlos = (1.0 / (kf + 1.0)).sqrt();
    Ok(los
        .into_iter()
        .map(|g| amp * (g * w_los + complex_gaussian(rng) * w_nlos))
        .collect())
}

/// One draw of `CN(0, 1)`.
pub fn complex_gaussian<R: Rng + ?Sized>(rng: &mut R) -> Complex64 {
    let re: f64 = rng.sample(StandardNormal);
    let im: f64 = rng.sample(StandardNormal);
    Complex64::new(re, im) * std::f64::consts::FRAC_1_SQRT_2
}

/// `count` points uniform over the disc of `radius` metres around `center`,
/// all at the centre's altitude.
pub fn sample_aircraft_positions<R: Rng + ?Sized>(
    center: Position3D,
    radius: f64,
    count: usize,
    rng: &mut R,
) -> Vec<Position3D> {
    (0..count)
        .map(|_| {
            let r = radius * rng.random::<f64>().sqrt();
            let phi = 2.0 * PI * rng.random::<f64>();
            Position3D::new(center.x + r * phi.cos(), center.y + r * phi.sin(), center.z)
        })
        .collect()
}

/// Draws every link of the scenario. Fading for aircraft `k` comes from
/// `streams.fading(k)`.
pub fn build_channels(
    geom: &ScenarioGeometry,
    prop: &PropagationParams,
    streams: &TrialStreams,
) -> Result<ChannelSet, ChannelError> {
    geom.validate()?;
    prop.validate()?;
    let mut h_s = Vec::with_capacity(geom.num_aircraft());
    let mut h_b = Vec::with_capacity(geom.num_aircraft());
    for k in 0..geom.num_aircraft() {
        h_s.push(s2a_channel(geom, prop, k)?);
        h_b.push(a2g_channel(geom, prop, k, &mut streams.fading(k))?);
    }
    let set = ChannelSet::from_links(h_s, h_b)?;
    debug_assert!(set
        .cascaded
        .iter()
        .zip(set.h_s.iter().zip(&set.h_b))
        .all(|(a, (s, b))| (a.frobenius_norm() - norm(s) * norm(b)).abs()
            <= 1e-12 * a.frobenius_norm().max(f64::MIN_POSITIVE)));
    Ok(set)
}

fn aircraft(geom: &ScenarioGeometry, k: usize) -> Result<&Position3D, ChannelError> {
    geom.aircraft.get(k).ok_or_else(|| {
        ChannelError::InvalidInput(format!("aircraft index {k} out of range ({})", geom.num_aircraft()))
    })
}

/// Independent random streams for one Monte-Carlo trial.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct TrialStreams {
    seed: u64,
}

const STREAM_PLACEMENT: u64 = 0;
const STREAM_STRATEGY: u64 = 1;
const STREAM_FADING_BASE: u64 = 1 << 32;

impl TrialStreams {
    pub fn new(seed: u64) -> Self {
        Self { seed }
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    pub fn placement(&self) -> ChaCha8Rng {
        self.stream(STREAM_PLACEMENT)
    }

    pub fn strategy(&self) -> ChaCha8Rng {
        self.stream(STREAM_STRATEGY)
    }

    pub fn fading(&self, aircraft: usize) -> ChaCha8Rng {
        self.stream(STREAM_FADING_BASE + aircraft as u64)
    }

    fn stream(&self, id: u64) -> ChaCha8Rng {
        let mut rng = ChaCha8Rng::seed_from_u64(self.seed);
        rng.set_stream(id);
        rng
    }
}
