//! Conventional particle filter: motion model as proposal, range likelihood
//! as weight.

use rand::Rng;
use serde::{Deserialize, Serialize};

use super::dual_mcl::{FilterEstimate, FilterState};
use super::normalize_log_weights;
use super::particles::{estimate_from_particles, sample_velocities, DiagonalCovariance, Particle, ParticleSet};
use super::resample::low_variance_resample;
use crate::geometry::{AnchorLayout, RangeTriple};
use crate::{Error, Result, Vec2};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct StandardPfConfig {
    pub m: usize,
    /// Tag velocity transition spread, (m/s)^2.
    pub q_1mot: DiagonalCovariance,
    /// Assumed per-anchor range noise std in the likelihood, meters.
    pub range_sigma: [f64; 3],
    #[serde(skip)]
    pub ts: f64,
}

impl StandardPfConfig {
    pub fn validate(&self) -> Result<()> {
        if self.m == 0 {
            return Err(Error::param("m", "particle count must be >= 1"));
        }
        if self.range_sigma.iter().any(|s| !(s.is_finite() && *s > 0.0)) {
            return Err(Error::param("range_sigma", "likelihood std must be > 0"));
        }
        if !(self.ts.is_finite() && self.ts > 0.0) {
            return Err(Error::param("ts", format!("sample time must be > 0, got {}", self.ts)));
        }
        Ok(())
    }
}

/// `sum_j ln N(d_j; |x - q_j|, sigma_j^2)`.
pub fn range_log_likelihood(x: &Vec2, ranges: &RangeTriple, layout: &AnchorLayout, sigma: &[f64; 3]) -> f64 {
    layout
        .anchors()
        .iter()
        .zip(ranges.d.iter().zip(sigma))
        .map(|(q, (d, s))| {
            let e = d - (x - q).norm();
            -0.5 * (e * e / (s * s)) - (s * (2.0 * std::f64::consts::PI).sqrt()).ln()
        })
        .sum()
}

pub fn standard_pf_step<R: Rng + ?Sized>(
    state: &FilterState,
    ranges: &RangeTriple,
    v0_k: &Vec2,
    config: &StandardPfConfig,
    layout: &AnchorLayout,
    rng: &mut R,
) -> Result<(FilterState, FilterEstimate)> {
    config.validate()?;
    let step = state.step + 1;
    let m = state.particles.len();
    if m != config.m {
        return Err(Error::LengthMismatch {
            what: "particle set vs configured m",
            left: m,
            right: config.m,
        });
    }

    let velocities = sample_velocities(&state.v1_hat, &config.q_1mot, m, rng);
    let predicted: Vec<Particle> = state
        .particles
        .iter()
        .zip(&velocities)
        .map(|(p, v)| Particle {
            x: p.x + (v - v0_k) * config.ts,
            w: p.w,
        })
        .collect();

    let log_w: Vec<f64> = predicted
        .iter()
        .map(|p| range_log_likelihood(&p.x, ranges, layout, &config.range_sigma))
        .collect();
    let weights = normalize_log_weights(&log_w);
    let mut set = ParticleSet::new(predicted, step)?;
    set.set_weights(&weights)?;

    let v1_hat = velocities
        .iter()
        .zip(&weights)
        .fold(Vec2::zeros(), |acc, (v, w)| acc + v * *w);

    let particles = low_variance_resample(&set, rng);
    let r_hat = estimate_from_particles(&particles)?;
    Ok((
        FilterState {
            particles,
            v1_hat,
            step,
        },
        FilterEstimate { r_hat, v1_hat, step },
    ))
}
