//! Relative-position estimators.
//!
//! [`dual_mcl`] samples hypotheses around the constructed measurement and
//! weights them by a kernel density of the motion-propagated previous belief.
//! [`standard_pf`] is the conventional motion-proposal particle filter and
//! [`ekf`] a range-measurement EKF over `[r; v1]`; both serve as baselines.

pub mod dual_mcl;
pub mod ekf;
pub mod estimator;
pub mod kde;
pub mod particles;
pub mod resample;
pub mod standard_pf;

pub use dual_mcl::{
    dual_mcl_step, importance_weights, init_dual_mcl, DualMclConfig, FilterEstimate, FilterState,
    InitRegion, velocity_update,
};
pub use ekf::{ekf_step, init_ekf, range_jacobian, range_model, EkfConfig, EkfState};
pub use estimator::{Estimator, EstimatorConfig, EstimatorKind};
pub use kde::{find_density, BandwidthRule, KernelDensity, LogDensity};
pub use particles::{
    auxiliary_positions, estimate_from_particles, sample_proposal, sample_velocities,
    DiagonalCovariance, Particle, ParticleSet,
};
pub use resample::{low_variance_resample, systematic_indices};
pub use standard_pf::{range_log_likelihood, standard_pf_step, StandardPfConfig};

/// Normalizes log-weights in place into probabilities summing to one.
///
/// Falls back to uniform weights when no entry is finite.
pub(crate) fn normalize_log_weights(log_w: &[f64]) -> Vec<f64> {
    let m = log_w.len();
    let max = log_w
        .iter()
        .copied()
        .filter(|v| v.is_finite())
        .fold(f64::NEG_INFINITY, f64::max);
    if !max.is_finite() {
        return vec![1.0 / m as f64; m];
    }
    let mut w: Vec<f64> = log_w
        .iter()
        .map(|&l| if l.is_nan() { 0.0 } else { (l - max).exp() })
        .collect();
    let sum: f64 = w.iter().sum();
    if !(sum.is_finite() && sum > 0.0) {
        return vec![1.0 / m as f64; m];
    }
    w.iter_mut().for_each(|v| *v /= sum);
    w
}
