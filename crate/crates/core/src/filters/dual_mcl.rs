//! Dual Monte-Carlo localization.
//!
//! Per step:
//!
//! 1. build `r_meas` from the three ranges;
//! 2. draw `m` hypotheses from `N(r_meas, Q_obs)`;
//! 3. propagate the previous belief through the relative motion model and
//!    turn it into a kernel density;
//! 4. draw `m` tag velocities around the last velocity estimate and form the
//!    auxiliary positions `r_avg + v * Ts`, where `r_avg` is the previous
//!    estimate moved by the anchor command, `r_hat_{k-1} - v0_k * Ts`;
//! 5. weight each hypothesis by `density(x_i) * N(r_aux_i; r_meas, Q_obs)`;
//! 6. resample with a low-variance comb.
//!
//! The position estimate is the mean of the resampled set. The velocity
//! estimate comes from [`velocity_update`].

use rand::Rng;
use serde::{Deserialize, Serialize};

use super::kde::{find_density, BandwidthRule, LogDensity};
use super::normalize_log_weights;
use super::particles::{
    auxiliary_positions, estimate_from_particles, sample_proposal, sample_velocities,
    DiagonalCovariance, ParticleSet,
};
use super::resample::low_variance_resample;
use crate::geometry::{construct_measurement, AnchorLayout, RangeTriple};
use crate::{Error, Result, Vec2};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DualMclConfig {
    /// Particle count.
    pub m: usize,
    /// Spread of hypotheses around the constructed measurement, m^2.
    pub q_obs: DiagonalCovariance,
    /// Tag velocity transition spread, (m/s)^2.
    pub q_1mot: DiagonalCovariance,
    /// Filled in from the scenario loop rate.
    #[serde(skip)]
    pub ts: f64,
    #[serde(default)]
    pub bandwidth: BandwidthRule,
}

impl DualMclConfig {
    pub fn new(m: usize, sigma_obs: f64, sigma_mot: f64, ts: f64) -> Result<Self> {
        let cfg = DualMclConfig {
            m,
            q_obs: DiagonalCovariance::isotropic(sigma_obs)?,
            q_1mot: DiagonalCovariance::isotropic(sigma_mot)?,
            ts,
            bandwidth: BandwidthRule::Scott,
        };
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<()> {
        if self.m == 0 {
            return Err(Error::param("m", "particle count must be >= 1"));
        }
        if !(self.ts.is_finite() && self.ts > 0.0) {
            return Err(Error::param("ts", format!("sample time must be > 0, got {}", self.ts)));
        }
        Ok(())
    }
}

/// Where the initial belief is spread.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", deny_unknown_fields)]
pub enum InitRegion {
    /// Axis-aligned box `[min.x, max.x] x [min.y, max.y]`.
    Box { min: Vec2, max: Vec2 },
    Point(Vec2),
}

impl InitRegion {
    pub fn validate(&self) -> Result<()> {
        match self {
            InitRegion::Box { min, max } => {
                let ok = min.iter().chain(max.iter()).all(|v| v.is_finite())
                    && min.x <= max.x
                    && min.y <= max.y;
                if !ok {
                    return Err(Error::param("init_region", "box must satisfy min <= max"));
                }
            }
            InitRegion::Point(p) => {
                if !p.iter().all(|v| v.is_finite()) {
                    return Err(Error::param("init_region", "point must be finite"));
                }
            }
        }
        Ok(())
    }

    pub fn center(&self) -> Vec2 {
        match self {
            InitRegion::Box { min, max } => (min + max) / 2.0,
            InitRegion::Point(p) => *p,
        }
    }

    /// Per-axis variance of the uniform distribution over the region.
    pub fn variance(&self) -> Vec2 {
        match self {
            InitRegion::Box { min, max } => (max - min).map(|w| w * w / 12.0),
            InitRegion::Point(_) => Vec2::zeros(),
        }
    }

    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> Vec2 {
        match self {
            InitRegion::Box { min, max } => Vec2::new(
                min.x + (max.x - min.x) * rng.random::<f64>(),
                min.y + (max.y - min.y) * rng.random::<f64>(),
            ),
            InitRegion::Point(p) => *p,
        }
    }
}

/// Posterior particle set plus the running tag-velocity estimate.
#[derive(Debug, Clone, PartialEq)]
pub struct FilterState {
    pub particles: ParticleSet,
    pub v1_hat: Vec2,
    pub step: usize,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FilterEstimate {
    pub r_hat: Vec2,
    pub v1_hat: Vec2,
    pub step: usize,
}

pub fn init_dual_mcl<R: Rng + ?Sized>(
    region: &InitRegion,
    m: usize,
    rng: &mut R,
) -> Result<FilterState> {
    if m == 0 {
        return Err(Error::param("m", "particle count must be >= 1"));
    }
    region.validate()?;
    let points = (0..m).map(|_| region.sample(rng)).collect();
    Ok(FilterState {
        particles: ParticleSet::uniform(points, 0)?,
        v1_hat: Vec2::zeros(),
        step: 0,
    })
}

/// Normalized weights `density(x_i) * N(aux_i; r_meas, q_obs)`.
///
/// Computed in the log domain; falls back to uniform weights when every
/// hypothesis is impossible.
pub fn importance_weights<D: LogDensity + ?Sized>(
    particles: &ParticleSet,
    density: &D,
    aux: &[Vec2],
    r_meas: &Vec2,
    q_obs: &DiagonalCovariance,
) -> Result<Vec<f64>> {
    if particles.len() != aux.len() {
        return Err(Error::LengthMismatch {
            what: "particles vs auxiliary positions",
            left: particles.len(),
            right: aux.len(),
        });
    }
    let log_w: Vec<f64> = particles
        .iter()
        .zip(aux)
        .map(|(p, a)| density.ln_density(&p.x) + q_obs.ln_pdf(a, r_meas))
        .collect();
    Ok(normalize_log_weights(&log_w))
}

/// Tag velocity estimate from the sampled velocities.
///
/// Hypotheses and velocities are drawn independently, so the joint weight
/// factors into a position part and a velocity part; only the velocity part,
/// `N(r_aux_i; r_meas, q_obs)`, is used here. The sample-mean deviation of the
/// draws is subtracted so that uninformative weights leave `v1_prev`
/// unchanged instead of letting it random-walk.
pub fn velocity_update(
    v1_prev: &Vec2,
    velocities: &[Vec2],
    aux: &[Vec2],
    r_meas: &Vec2,
    q_obs: &DiagonalCovariance,
) -> Result<Vec2> {
    if velocities.len() != aux.len() {
        return Err(Error::LengthMismatch {
            what: "velocities vs auxiliary positions",
            left: velocities.len(),
            right: aux.len(),
        });
    }
    if velocities.is_empty() {
        return Ok(*v1_prev);
    }
    let log_w: Vec<f64> = aux.iter().map(|a| q_obs.ln_pdf(a, r_meas)).collect();
    let w = normalize_log_weights(&log_w);
    let weighted = velocities.iter().zip(&w).fold(Vec2::zeros(), |acc, (v, w)| acc + v * *w);
    let mean = velocities.iter().sum::<Vec2>() / velocities.len() as f64;
    Ok(v1_prev + weighted - mean)
}

/// One dual MCL update with ranges `ranges` and anchor velocity `v0_k`.
pub fn dual_mcl_step<R: Rng + ?Sized>(
    state: &FilterState,
    ranges: &RangeTriple,
    v0_k: &Vec2,
    config: &DualMclConfig,
    layout: &AnchorLayout,
    rng: &mut R,
) -> Result<(FilterState, FilterEstimate)> {
    config.validate()?;
    let step = state.step + 1;
    let r_meas = construct_measurement(ranges, layout)?.r_meas;

    let mut proposal = sample_proposal(&r_meas, &config.q_obs, config.m, step, rng)?;
    let density = find_density(
        &state.particles,
        v0_k,
        &state.v1_hat,
        &config.q_1mot,
        config.ts,
        config.bandwidth,
        rng,
    )?;

    let velocities = sample_velocities(&state.v1_hat, &config.q_1mot, config.m, rng);
    let r_avg = estimate_from_particles(&state.particles)? - v0_k * config.ts;
    let aux = auxiliary_positions(&r_avg, &velocities, config.ts);

    let weights = importance_weights(&proposal, &density, &aux, &r_meas, &config.q_obs)?;
    proposal.set_weights(&weights)?;
    let v1_hat = velocity_update(&state.v1_hat, &velocities, &aux, &r_meas, &config.q_obs)?;

    let particles = low_variance_resample(&proposal, rng);
    let r_hat = estimate_from_particles(&particles)?;

    let estimate = FilterEstimate { r_hat, v1_hat, step };
    Ok((
        FilterState {
            particles,
            v1_hat,
            step,
        },
        estimate,
    ))
}
