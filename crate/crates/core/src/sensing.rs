//! UWB range noise synthesis and per-anchor calibration.

use rand::Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::geometry::RangeTriple;
use crate::{Error, Result};

/// Additive range error `d = d_true + bias + N(0, sigma^2)` per anchor.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RangeNoiseModel {
    pub bias: [f64; 3],
    pub sigma: [f64; 3],
}

impl RangeNoiseModel {
    pub fn new(bias: [f64; 3], sigma: [f64; 3]) -> Result<Self> {
        let model = RangeNoiseModel { bias, sigma };
        model.validate()?;
        Ok(model)
    }

    /// Zero bias, the same standard deviation on every anchor.
    pub fn isotropic(sigma: f64) -> Result<Self> {
        Self::new([0.0; 3], [sigma; 3])
    }

    pub fn noiseless() -> Self {
        RangeNoiseModel {
            bias: [0.0; 3],
            sigma: [0.0; 3],
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.sigma.iter().any(|s| !(s.is_finite() && *s >= 0.0)) {
            return Err(Error::param("sigma", "range noise std must be finite and >= 0"));
        }
        if self.bias.iter().any(|b| !b.is_finite()) {
            return Err(Error::param("bias", "range bias must be finite"));
        }
        Ok(())
    }
}

/// Applies bias and Gaussian noise to noiseless ranges, clamping at zero.
pub fn corrupt_ranges<R: Rng + ?Sized>(
    truth: &RangeTriple,
    model: &RangeNoiseModel,
    rng: &mut R,
) -> RangeTriple {
    let mut d = truth.d;
    for (i, di) in d.iter_mut().enumerate() {
        let eta: f64 = rng.sample(StandardNormal);
        *di = (*di + model.bias[i] + model.sigma[i] * eta).max(0.0);
    }
    RangeTriple { d, step: truth.step }
}

/// `(measured, truth)` range pairs recorded per anchor under line of sight.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct CalibrationRecord {
    pub pairs: [Vec<(f64, f64)>; 3],
}

impl CalibrationRecord {
    /// `anchor` is zero-based.
    pub fn push(&mut self, anchor: usize, measured: f64, truth: f64) -> Result<()> {
        let slot = self
            .pairs
            .get_mut(anchor)
            .ok_or_else(|| Error::InvalidInput(format!("anchor index {anchor} out of range")))?;
        slot.push((measured, truth));
        Ok(())
    }
}

/// Recovers per-anchor bias (mean residual) and noise std (unbiased sample std).
pub fn calibrate(records: &CalibrationRecord) -> Result<RangeNoiseModel> {
    let mut bias = [0.0; 3];
    let mut sigma = [0.0; 3];
    for (i, pairs) in records.pairs.iter().enumerate() {
        if pairs.len() < 2 {
            return Err(Error::InsufficientData(format!(
                "anchor {} has {} calibration pairs, need at least 2",
                i + 1,
                pairs.len()
            )));
        }
        let n = pairs.len() as f64;
        let mean = pairs.iter().map(|(m, t)| m - t).sum::<f64>() / n;
        let var = pairs
            .iter()
            .map(|(m, t)| (m - t - mean).powi(2))
            .sum::<f64>()
            / (n - 1.0);
        bias[i] = mean;
        sigma[i] = var.sqrt();
    }
    RangeNoiseModel::new(bias, sigma)
}
