//! Motion-predicted belief as a Gaussian kernel density.

use rand::Rng;
use serde::{Deserialize, Serialize};

use super::particles::{DiagonalCovariance, ParticleSet};
use crate::{Error, Result, Vec2};

/// Smallest per-axis bandwidth, keeps a collapsed particle cloud evaluable.
pub const MIN_BANDWIDTH: f64 = 1e-3;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum BandwidthRule {
    /// `h = sigma_axis * n^(-1/6)`, Scott's rule in two dimensions.
    #[default]
    Scott,
    /// Same bandwidth in meters on both axes.
    Fixed(f64),
}

/// Anything that can score a hypothesis by its log density.
pub trait LogDensity {
    fn ln_density(&self, x: &Vec2) -> f64;

    fn density(&self, x: &Vec2) -> f64 {
        self.ln_density(x).exp()
    }
}

/// Weighted sum of axis-aligned Gaussian kernels.
#[derive(Debug, Clone)]
pub struct KernelDensity {
    centers: Vec<Vec2>,
    ln_weights: Vec<f64>,
    bandwidth: Vec2,
    ln_norm: f64,
}

impl KernelDensity {
    /// Kernel density over `centers` with weights `weights` (normalized here).
    pub fn new(centers: Vec<Vec2>, weights: &[f64], rule: BandwidthRule) -> Result<Self> {
        if centers.is_empty() {
            return Err(Error::EmptyParticleSet);
        }
        if weights.len() != centers.len() {
            return Err(Error::LengthMismatch {
                what: "kernel weights vs centers",
                left: weights.len(),
                right: centers.len(),
            });
        }
        let total: f64 = weights.iter().sum();
        let uniform = !(total.is_finite() && total > 0.0);
        let n = centers.len() as f64;
        let w: Vec<f64> = if uniform {
            vec![1.0 / n; centers.len()]
        } else {
            weights.iter().map(|w| w / total).collect()
        };

        let bandwidth = match rule {
            BandwidthRule::Fixed(h) => {
                if !(h.is_finite() && h > 0.0) {
                    return Err(Error::param("bandwidth", format!("fixed bandwidth must be > 0, got {h}")));
                }
                Vec2::repeat(h)
            }
            BandwidthRule::Scott => {
                let mean = centers.iter().zip(&w).fold(Vec2::zeros(), |acc, (c, w)| acc + c * *w);
                let var = centers.iter().zip(&w).fold(Vec2::zeros(), |acc, (c, w)| {
                    acc + (c - mean).component_mul(&(c - mean)) * *w
                });
                let factor = n.powf(-1.0 / 6.0);
                var.map(|v| (v.sqrt() * factor).max(MIN_BANDWIDTH))
            }
        };

        let ln_norm = -(2.0 * std::f64::consts::PI * bandwidth.x * bandwidth.y).ln();
        let ln_weights = w.iter().map(|w| w.ln()).collect();
        Ok(KernelDensity {
            centers,
            ln_weights,
            bandwidth,
            ln_norm,
        })
    }

    pub fn bandwidth(&self) -> Vec2 {
        self.bandwidth
    }

    pub fn centers(&self) -> &[Vec2] {
        &self.centers
    }
}

impl LogDensity for KernelDensity {
    fn ln_density(&self, x: &Vec2) -> f64 {
        let inv_h = self.bandwidth.map(|h| 1.0 / h);
        // streaming log-sum-exp
        let mut max = f64::NEG_INFINITY;
        let mut sum = 0.0;
        for (c, lw) in self.centers.iter().zip(&self.ln_weights) {
            let dx = (x.x - c.x) * inv_h.x;
            let dy = (x.y - c.y) * inv_h.y;
            let e = lw - 0.5 * (dx * dx + dy * dy);
            if e <= max {
                sum += (e - max).exp();
            } else if e.is_finite() {
                sum = sum * (max - e).exp() + 1.0;
                max = e;
            }
        }
        if !max.is_finite() {
            return f64::NEG_INFINITY;
        }
        max + sum.ln() + self.ln_norm
    }
}

/// Propagates the previous belief through the relative motion model and
/// builds a kernel density over the propagated hypotheses.
///
/// Each hypothesis moves by `(v - v0_k) * ts` with its own tag velocity
/// `v ~ N(v1_hat_prev, q_1mot)`.
pub fn find_density<R: Rng + ?Sized>(
    prev: &ParticleSet,
    v0_k: &Vec2,
    v1_hat_prev: &Vec2,
    q_1mot: &DiagonalCovariance,
    ts: f64,
    rule: BandwidthRule,
    rng: &mut R,
) -> Result<KernelDensity> {
    if prev.is_empty() {
        return Err(Error::EmptyParticleSet);
    }
    let centers = prev
        .positions()
        .map(|x| {
            let v = q_1mot.sample(v1_hat_prev, rng);
            x + (v - v0_k) * ts
        })
        .collect();
    KernelDensity::new(centers, &prev.weights(), rule)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn argmax_on_grid(d: &KernelDensity, lo: Vec2, hi: Vec2, n: usize) -> Vec2 {
        let mut best = (f64::NEG_INFINITY, Vec2::zeros());
        for i in 0..=n {
            for j in 0..=n {
                let q = Vec2::new(
                    lo.x + (hi.x - lo.x) * i as f64 / n as f64,
                    lo.y + (hi.y - lo.y) * j as f64 / n as f64,
                );
                let v = d.ln_density(&q);
                if v > best.0 {
                    best = (v, q);
                }
            }
        }
        best.1
    }

    #[test]
    fn point_mass_is_translated() {
        let mut rng = ChaCha8Rng::seed_from_u64(0);
        let prev = ParticleSet::uniform(vec![Vec2::zeros(); 50], 0).unwrap();
        let zero = DiagonalCovariance::new(0.0, 0.0).unwrap();
        let d = find_density(&prev, &Vec2::zeros(), &Vec2::new(1.0, 0.0), &zero, 0.1, BandwidthRule::Scott, &mut rng)
            .unwrap();
        let mode = argmax_on_grid(&d, Vec2::new(-0.5, -0.5), Vec2::new(0.5, 0.5), 100);
        assert_abs_diff_eq!(mode, Vec2::new(0.1, 0.0), epsilon = 1e-9);
    }

    #[test]
    fn mode_of_gaussian_cloud() {
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        let c = Vec2::new(-2.0, 2.0);
        let cloud = DiagonalCovariance::isotropic(0.5).unwrap();
        let prev = ParticleSet::uniform((0..1000).map(|_| cloud.sample(&c, &mut rng)).collect(), 0).unwrap();
        let zero = DiagonalCovariance::new(0.0, 0.0).unwrap();
        let v = Vec2::new(0.3, -0.2);
        let d = find_density(&prev, &v, &v, &zero, 0.1, BandwidthRule::Scott, &mut rng).unwrap();
        let mode = argmax_on_grid(&d, c - Vec2::repeat(1.0), c + Vec2::repeat(1.0), 80);
        assert!((mode - c).amax() < 0.1, "mode {mode}");
    }

    #[test]
    fn fixed_bandwidth_positive_at_mode() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let prev = ParticleSet::uniform(vec![Vec2::new(1.0, 1.0); 10], 0).unwrap();
        let zero = DiagonalCovariance::new(0.0, 0.0).unwrap();
        let d = find_density(&prev, &Vec2::zeros(), &Vec2::zeros(), &zero, 0.1, BandwidthRule::Fixed(0.5), &mut rng)
            .unwrap();
        assert_eq!(d.bandwidth(), Vec2::repeat(0.5));
        let v = d.density(&Vec2::new(1.0, 1.0));
        assert!(v.is_finite() && v > 0.0);
        // single Gaussian kernel with h = 0.5
        assert_abs_diff_eq!(v, 1.0 / (2.0 * std::f64::consts::PI * 0.25), epsilon = 1e-12);
    }

    #[test]
    fn density_integrates_to_one() {
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        let cloud = DiagonalCovariance::new(0.3, 0.1).unwrap();
        let prev = ParticleSet::uniform((0..40).map(|_| cloud.sample(&Vec2::zeros(), &mut rng)).collect(), 0).unwrap();
        let d = KernelDensity::new(prev.positions().collect(), &prev.weights(), BandwidthRule::Scott).unwrap();
        // midpoint quadrature over a box wide enough to hold all the mass
        let (n, half) = (300, 4.0);
        let cell = 2.0 * half / n as f64;
        let mut total = 0.0;
        for i in 0..n {
            for j in 0..n {
                let q = Vec2::new(-half + (i as f64 + 0.5) * cell, -half + (j as f64 + 0.5) * cell);
                total += d.density(&q) * cell * cell;
            }
        }
        assert!((total - 1.0).abs() < 1e-3, "integral {total}");
    }

    #[test]
    fn far_queries_keep_their_ordering() {
        let d = KernelDensity::new(vec![Vec2::zeros()], &[1.0], BandwidthRule::Fixed(0.01)).unwrap();
        let near = d.ln_density(&Vec2::new(5.0, 0.0));
        let far = d.ln_density(&Vec2::new(6.0, 0.0));
        assert!(near.is_finite() && far.is_finite() && near > far);
    }

    #[test]
    fn invalid_inputs() {
        assert!(KernelDensity::new(vec![], &[], BandwidthRule::Scott).is_err());
        assert!(KernelDensity::new(vec![Vec2::zeros()], &[1.0], BandwidthRule::Fixed(0.0)).is_err());
        assert!(KernelDensity::new(vec![Vec2::zeros()], &[1.0, 2.0], BandwidthRule::Scott).is_err());
    }
}
