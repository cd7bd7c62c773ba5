use rand::Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::{Error, Result, Vec2};

/// Diagonal 2x2 covariance stored as its variances.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "[f64; 2]", into = "[f64; 2]")]
pub struct DiagonalCovariance {
    variance: Vec2,
}

impl DiagonalCovariance {
    pub fn new(var_x: f64, var_y: f64) -> Result<Self> {
        if [var_x, var_y].iter().any(|v| !(v.is_finite() && *v >= 0.0)) {
            return Err(Error::param("covariance", "diagonal entries must be finite and >= 0"));
        }
        Ok(DiagonalCovariance {
            variance: Vec2::new(var_x, var_y),
        })
    }

    /// `diag(sigma^2, sigma^2)`.
    pub fn isotropic(sigma: f64) -> Result<Self> {
        Self::new(sigma * sigma, sigma * sigma)
    }

    pub fn variance(&self) -> Vec2 {
        self.variance
    }

    pub fn std_dev(&self) -> Vec2 {
        self.variance.map(f64::sqrt)
    }

    /// Draws from `N(mean, self)`.
    pub fn sample<R: Rng + ?Sized>(&self, mean: &Vec2, rng: &mut R) -> Vec2 {
        let sd = self.std_dev();
        Vec2::new(
            mean.x + sd.x * rng.sample::<f64, _>(StandardNormal),
            mean.y + sd.y * rng.sample::<f64, _>(StandardNormal),
        )
    }

    /// Log density of `N(mean, self)` at `x`.
    ///
    /// A zero-variance axis is a point mass: it contributes nothing when `x`
    /// matches the mean on that axis and `-inf` otherwise.
    pub fn ln_pdf(&self, x: &Vec2, mean: &Vec2) -> f64 {
        let mut acc = 0.0;
        for i in 0..2 {
            let d = x[i] - mean[i];
            let var = self.variance[i];
            if var > 0.0 {
                acc -= 0.5 * (d * d / var + (2.0 * std::f64::consts::PI * var).ln());
            } else if d != 0.0 {
                return f64::NEG_INFINITY;
            }
        }
        acc
    }
}

impl TryFrom<[f64; 2]> for DiagonalCovariance {
    type Error = Error;

    fn try_from(v: [f64; 2]) -> Result<Self> {
        Self::new(v[0], v[1])
    }
}

impl From<DiagonalCovariance> for [f64; 2] {
    fn from(c: DiagonalCovariance) -> Self {
        [c.variance.x, c.variance.y]
    }
}

/// A relative-position hypothesis in the anchor frame with its weight.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Particle {
    pub x: Vec2,
    pub w: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ParticleSet {
    particles: Vec<Particle>,
    pub step: usize,
}

impl ParticleSet {
    pub fn new(particles: Vec<Particle>, step: usize) -> Result<Self> {
        if particles.is_empty() {
            return Err(Error::EmptyParticleSet);
        }
        if particles.iter().any(|p| !(p.x.iter().all(|v| v.is_finite()) && p.w.is_finite())) {
            return Err(Error::NonFinite {
                step,
                what: "particle hypothesis or weight".into(),
            });
        }
        Ok(ParticleSet { particles, step })
    }

    /// Equally weighted set over `points`.
    pub fn uniform(points: Vec<Vec2>, step: usize) -> Result<Self> {
        let w = 1.0 / points.len().max(1) as f64;
        Self::new(points.into_iter().map(|x| Particle { x, w }).collect(), step)
    }

    pub fn len(&self) -> usize {
        self.particles.len()
    }

    pub fn is_empty(&self) -> bool {
        self.particles.is_empty()
    }

    pub fn particles(&self) -> &[Particle] {
        &self.particles
    }

    pub fn iter(&self) -> impl Iterator<Item = &Particle> {
        self.particles.iter()
    }

    pub fn positions(&self) -> impl Iterator<Item = Vec2> + '_ {
        self.particles.iter().map(|p| p.x)
    }

    pub fn weights(&self) -> Vec<f64> {
        self.particles.iter().map(|p| p.w).collect()
    }

    /// Replaces the weights; `weights` must match the particle count.
    pub fn set_weights(&mut self, weights: &[f64]) -> Result<()> {
        if weights.len() != self.len() {
            return Err(Error::LengthMismatch {
                what: "weights vs particles",
                left: weights.len(),
                right: self.len(),
            });
        }
        for (p, w) in self.particles.iter_mut().zip(weights) {
            p.w = *w;
        }
        Ok(())
    }
}

/// Weighted mean of the hypotheses.
pub fn estimate_from_particles(set: &ParticleSet) -> Result<Vec2> {
    if set.is_empty() {
        return Err(Error::EmptyParticleSet);
    }
    let total: f64 = set.iter().map(|p| p.w).sum();
    if total > 0.0 && total.is_finite() {
        Ok(set.iter().fold(Vec2::zeros(), |acc, p| acc + p.x * p.w) / total)
    } else {
        Ok(set.positions().sum::<Vec2>() / set.len() as f64)
    }
}

/// `m` equally weighted draws from `N(r_meas, q_obs)`.
pub fn sample_proposal<R: Rng + ?Sized>(
    r_meas: &Vec2,
    q_obs: &DiagonalCovariance,
    m: usize,
    step: usize,
    rng: &mut R,
) -> Result<ParticleSet> {
    if m == 0 {
        return Err(Error::param("m", "particle count must be >= 1"));
    }
    let points = (0..m).map(|_| q_obs.sample(r_meas, rng)).collect();
    ParticleSet::uniform(points, step)
}

/// `m` tag-velocity hypotheses drawn from `N(v1_hat_prev, q_1mot)`.
pub fn sample_velocities<R: Rng + ?Sized>(
    v1_hat_prev: &Vec2,
    q_1mot: &DiagonalCovariance,
    m: usize,
    rng: &mut R,
) -> Vec<Vec2> {
    (0..m).map(|_| q_1mot.sample(v1_hat_prev, rng)).collect()
}

/// `r_avg + v * ts` for every velocity hypothesis.
pub fn auxiliary_positions(r_avg: &Vec2, velocities: &[Vec2], ts: f64) -> Vec<Vec2> {
    velocities.iter().map(|v| r_avg + v * ts).collect()
}
