//! Low-variance (systematic) resampling.

use rand::Rng;

use super::particles::{Particle, ParticleSet};

/// Indices selected by a comb of `m` teeth spaced `1/m` apart starting at
/// `u` (`0 <= u < 1/m`) over the cumulative weights.
///
/// Weights need not be normalized; they are scaled by their sum.
pub fn systematic_indices(weights: &[f64], u: f64) -> Vec<usize> {
    let m = weights.len();
    if m == 0 {
        return Vec::new();
    }
    let total: f64 = weights.iter().sum();
    let step = 1.0 / m as f64;
    let mut out = Vec::with_capacity(m);
    let mut i = 0;
    // absorbs rounding in the running sum so that teeth landing exactly on
    // a boundary move on to the next particle
    let slack = 1e-12 * step;
    let mut cumulative = weights[0] / total;
    for j in 0..m {
        let tooth = u + j as f64 * step;
        while tooth + slack >= cumulative && i + 1 < m {
            i += 1;
            cumulative += weights[i] / total;
        }
        out.push(i);
    }
    out
}

/// Resamples `set` with a single uniform draw; output weights are `1/m`.
pub fn low_variance_resample<R: Rng + ?Sized>(set: &ParticleSet, rng: &mut R) -> ParticleSet {
    let m = set.len();
    let weights = set.weights();
    let total: f64 = weights.iter().sum();
    let weights = if total.is_finite() && total > 0.0 {
        weights
    } else {
        vec![1.0; m]
    };
    let u = rng.random::<f64>() / m as f64;
    let w = 1.0 / m as f64;
    let particles = systematic_indices(&weights, u)
        .into_iter()
        .map(|i| Particle {
            x: set.particles()[i].x,
            w,
        })
        .collect();
    ParticleSet::new(particles, set.step).expect("resampling preserves a valid set")
}
