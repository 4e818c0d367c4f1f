//! Echo model at the ground receiver and the SINR objective.
//!
//! With a unit-power symbol, aircraft `k` contributes `a_k = A_k t` to the
//! received vector. For the target `k0` the filter output SINR is
//!
//! ```text
//! SINR = |u^H a_k0|² / (u^H (Σ_{k≠k0} a_k a_k^H + σ² I) u)
//! ```
//!
//! Noise enters through its covariance `σ² I`, never through samples.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::channel::ChannelSet;
use crate::numerics::{conj, dot, norm_sqr, ComplexMatrix, ComplexVector, NumericsError};

/// Receiver noise power per antenna, watts.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct NoiseModel {
    pub sigma2: f64,
}

impl Default for NoiseModel {
    fn default() -> Self {
        Self { sigma2: 1e-12 }
    }
}

impl NoiseModel {
    pub fn new(sigma2: f64) -> Result<Self, NumericsError> {
        if !(sigma2 > 0.0) || !sigma2.is_finite() {
            return Err(NumericsError::InvalidInput(format!(
                "noise power must be positive, got {sigma2}"
            )));
        }
        Ok(Self { sigma2 })
    }
}

/// Transmit beamformer `t` (length `M_t`) and receive filter `u` (length `M_r`).
#[derive(Debug, Clone, PartialEq)]
pub struct BeamformerPair {
    pub t: ComplexVector,
    pub u: ComplexVector,
}

impl BeamformerPair {
    /// `‖t‖² ≤ P_t (1 + 1e-8)` and `‖u‖ = 1 ± 1e-10`.
    pub fn is_feasible(&self, power: f64) -> bool {
        norm_sqr(&self.t) <= power * (1.0 + 1e-8) && (norm_sqr(&self.u).sqrt() - 1.0).abs() <= 1e-10
    }
}

/// Numerator (`N = a_k0 a_k0^H`) and denominator (`D`) matrices of the SINR
/// as a Rayleigh quotient in `u`.
#[derive(Debug, Clone)]
pub struct SinrParts {
    pub n: ComplexMatrix,
    pub d: ComplexMatrix,
}

/// `a_k = A_k t`.
pub fn signal_vector(ch: &ChannelSet, t: &[Complex64], k: usize) -> Result<ComplexVector, NumericsError> {
    let a = ch
        .cascaded
        .get(k)
        .ok_or_else(|| NumericsError::InvalidInput(format!("aircraft index {k} out of range")))?;
    a.mul_vec(t)
}

pub fn build_sinr_parts(
    ch: &ChannelSet,
    t: &[Complex64],
    noise: NoiseModel,
    k0: usize,
) -> Result<SinrParts, NumericsError> {
    let target = signal_vector(ch, t, k0)?;
    let mut d = ComplexMatrix::scaled_identity(ch.rx_antennas(), noise.sigma2);
    for k in (0..ch.num_aircraft()).filter(|&k| k != k0) {
        d.add_assign(&ComplexMatrix::outer_hermitian(&signal_vector(ch, t, k)?))?;
    }
    Ok(SinrParts {
        n: ComplexMatrix::outer_hermitian(&target),
        d,
    })
}

/// `(u^H N u) / (u^H D u)`.
pub fn sinr(parts: &SinrParts, u: &[Complex64]) -> Result<f64, NumericsError> {
    if norm_sqr(u) == 0.0 {
        return Err(NumericsError::InvalidInput("receive filter is zero".into()));
    }
    let num = parts.n.quadratic_form(u)?;
    let den = parts.d.quadratic_form(u)?;
    Ok(num.max(0.0) / den)
}

/// Convenience: SINR straight from channels and a beamformer pair.
pub fn pair_sinr(
    ch: &ChannelSet,
    pair: &BeamformerPair,
    noise: NoiseModel,
    k0: usize,
) -> Result<f64, NumericsError> {
    sinr(&build_sinr_parts(ch, &pair.t, noise, k0)?, &pair.u)
}

/// Effective transmit-side rows for a fixed filter: `q = u^H A_k0` and
/// `r_k = u^H A_k` for each interferer.
#[derive(Debug, Clone)]
pub struct ProjectedChannels {
    pub q: ComplexVector,
    pub r: Vec<ComplexVector>,
}

pub fn project_channels(ch: &ChannelSet, u: &[Complex64], k0: usize) -> Result<ProjectedChannels, NumericsError> {
    if k0 >= ch.num_aircraft() {
        return Err(NumericsError::InvalidInput(format!("target index {k0} out of range")));
    }
    let uh = conj(u);
    let q = ch.cascaded[k0].vec_mul(&uh)?;
    let r = (0..ch.num_aircraft())
        .filter(|&k| k != k0)
        .map(|k| ch.cascaded[k].vec_mul(&uh))
        .collect::<Result<_, _>>()?;
    Ok(ProjectedChannels { q, r })
}

impl ProjectedChannels {
    /// `Σ_k |r_k t|² + σ² ‖u‖²` for a unit filter.
    pub fn interference_plus_noise(&self, t: &[Complex64], noise: NoiseModel) -> f64 {
        self.r.iter().map(|r| dot(r, t).norm_sqr()).sum::<f64>() + noise.sigma2
    }
}

/// Quadratic-transform surrogate
/// `f₂ = 2 Re{ϖ^* q t} − |ϖ|² (Σ_k |r_k t|² + σ²)`.
pub fn surrogate_f2(
    ch: &ChannelSet,
    t: &[Complex64],
    u: &[Complex64],
    varpi: Complex64,
    noise: NoiseModel,
    k0: usize,
) -> Result<f64, NumericsError> {
    let p = project_channels(ch, u, k0)?;
    let qt = dot(&p.q, t);
    Ok(2.0 * (varpi.conj() * qt).re - varpi.norm_sqr() * p.interference_plus_noise(t, noise))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::channel::{build_channels, sample_aircraft_positions, Position3D, PropagationParams, ScenarioGeometry, TrialStreams};
    use crate::numerics::{hermitian_eigendecompose, norm, scale};
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn scenario(seed: u64, k: usize, mt: usize, mr: usize) -> ChannelSet {
        let streams = TrialStreams::new(seed);
        let center = Position3D::from_km(20.0, 20.0, 10.0);
        let geom = ScenarioGeometry {
            satellite: Position3D::from_km(-10.0, 20.0, 300.0),
            bs: Position3D::new(0.0, 0.0, 0.0),
            aircraft: sample_aircraft_positions(center, 10e3, k, &mut streams.placement()),
            target_index: 0,
            tx_antennas: mt,
            rx_antennas: mr,
            spacing_ratio: 0.5,
        };
        build_channels(&geom, &PropagationParams::default(), &streams).unwrap()
    }

    fn random_vec(rng: &mut ChaCha8Rng, n: usize) -> ComplexVector {
        (0..n).map(|_| Complex64::new(rng.random::<f64>() - 0.5, rng.random::<f64>() - 0.5)).collect()
    }

    #[test]
    fn zero_beam_gives_zero_signal() {
        let ch = scenario(1, 4, 4, 3);
        let a = signal_vector(&ch, &[Complex64::new(0.0, 0.0); 4], 0).unwrap();
        assert!(a.iter().all(|z| *z == Complex64::new(0.0, 0.0)));
        assert!(signal_vector(&ch, &[Complex64::new(0.0, 0.0); 3], 0).is_err());
    }

    #[test]
    fn signal_vector_is_associative() {
        let ch = scenario(2, 4, 6, 5);
        let mut rng = ChaCha8Rng::seed_from_u64(0);
        let t = random_vec(&mut rng, 6);
        for k in 0..4 {
            let direct = signal_vector(&ch, &t, k).unwrap();
            let via = scale(&ch.h_b[k], dot(&ch.h_s[k], &t));
            for (x, y) in direct.iter().zip(&via) {
                assert!((x - y).norm() <= 1e-12 * norm(&direct));
            }
        }
    }

    #[test]
    fn single_aircraft_denominator_is_noise() {
        let ch = scenario(3, 1, 4, 4);
        let t = vec![Complex64::new(0.5, 0.0); 4];
        let noise = NoiseModel::default();
        let parts = build_sinr_parts(&ch, &t, noise, 0).unwrap();
        assert_eq!(parts.d, ComplexMatrix::scaled_identity(4, noise.sigma2));
        let a = signal_vector(&ch, &t, 0).unwrap();
        assert!((parts.n.trace().re - norm_sqr(&a)).abs() <= 1e-12 * norm_sqr(&a));
        // matched filter reaches ‖a‖²/σ²
        let u = scale(&a, Complex64::new(1.0 / norm(&a), 0.0));
        let s = sinr(&parts, &u).unwrap();
        assert!((s / (norm_sqr(&a) / noise.sigma2) - 1.0).abs() < 1e-12);
    }

    #[test]
    fn interference_has_rank_at_most_three() {
        let ch = scenario(4, 4, 4, 6);
        let t = vec![Complex64::new(0.5, 0.1); 4];
        let noise = NoiseModel::default();
        let parts = build_sinr_parts(&ch, &t, noise, 0).unwrap();
        // σ²I is orders of magnitude above the echoes; rebuild without it
        let quiet = build_sinr_parts(&ch, &t, NoiseModel { sigma2: 0.0 }, 0).unwrap();
        let interference = quiet.d;
        assert!(parts.d.sub(&interference).unwrap().sub(&ComplexMatrix::scaled_identity(6, noise.sigma2)).unwrap().max_abs() < 1e-24);
        let eig = hermitian_eigendecompose(&interference, 1e-10).unwrap();
        let top = *eig.eigenvalues.last().unwrap();
        assert!(eig.eigenvalues.iter().all(|&l| l >= -1e-10 * top));
        let significant = eig.eigenvalues.iter().filter(|&&l| l > 1e-9 * top).count();
        assert!(significant <= 3);
    }

    #[test]
    fn orthogonal_filter_gives_zero() {
        let ch = scenario(5, 2, 3, 2);
        let t = vec![Complex64::new(1.0, 0.0); 3];
        let parts = build_sinr_parts(&ch, &t, NoiseModel::default(), 0).unwrap();
        let a = signal_vector(&ch, &t, 0).unwrap();
        let u = vec![-a[1].conj(), a[0].conj()];
        assert!(sinr(&parts, &u).unwrap() <= 1e-20);
        assert!(sinr(&parts, &[Complex64::new(0.0, 0.0); 2]).is_err());
    }

    #[test]
    fn scale_invariance_and_upper_bound() {
        let ch = scenario(6, 4, 4, 4);
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let noise = NoiseModel::default();
        for _ in 0..20 {
            let t = random_vec(&mut rng, 4);
            let u = random_vec(&mut rng, 4);
            let parts = build_sinr_parts(&ch, &t, noise, 0).unwrap();
            let s1 = sinr(&parts, &u).unwrap();
            let s5 = sinr(&parts, &scale(&u, Complex64::new(5.0, 0.0))).unwrap();
            assert!((s1 - s5).abs() <= 1e-12 * s1);
            let a = signal_vector(&ch, &t, 0).unwrap();
            assert!(s1 <= norm_sqr(&a) / noise.sigma2 * (1.0 + 1e-12));
            assert!(parts.d.quadratic_form(&u).unwrap() >= noise.sigma2 * norm_sqr(&u) * (1.0 - 1e-12));
        }
    }

    #[test]
    fn surrogate_at_zero_weight() {
        let ch = scenario(7, 3, 2, 2);
        let u = vec![Complex64::new(1.0, 0.0), Complex64::new(0.0, 0.0)];
        let t = vec![Complex64::new(1.0, 0.0); 2];
        let f = surrogate_f2(&ch, &t, &u, Complex64::new(0.0, 0.0), NoiseModel::default(), 0).unwrap();
        assert_eq!(f, 0.0);
    }

    #[test]
    fn surrogate_is_tight_at_optimal_weight_and_concave() {
        let noise = NoiseModel::default();
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        for seed in 0..10 {
            let ch = scenario(seed, 4, 4, 4);
            let t = random_vec(&mut rng, 4);
            let u = crate::numerics::normalized(&random_vec(&mut rng, 4)).unwrap();
            let p = project_channels(&ch, &u, 0).unwrap();
            // ϖ* computed inline, independently of the optimizer module
            let w = dot(&p.q, &t) / p.interference_plus_noise(&t, noise);
            let f = surrogate_f2(&ch, &t, &u, w, noise, 0).unwrap();
            let s = pair_sinr(&ch, &BeamformerPair { t: t.clone(), u: u.clone() }, noise, 0).unwrap();
            assert!((f - s).abs() <= 1e-10 * s);
            for _ in 0..5 {
                let delta = Complex64::new(rng.random::<f64>() - 0.5, rng.random::<f64>() - 0.5) * w.norm();
                let g = surrogate_f2(&ch, &t, &u, w + delta, noise, 0).unwrap();
                assert!(g <= f * (1.0 + 1e-12));
            }
        }
    }
}
