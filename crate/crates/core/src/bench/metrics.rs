use crate::sim::ScenarioTrace;
use crate::{Error, Result};

/// Steps dropped from the start of a run for threshold checks.
pub const DEFAULT_SKIP_TRANSIENT: usize = 10;

/// Root mean square of the position error over steps `skip_transient..`.
pub fn rmse(trace: &ScenarioTrace, skip_transient: usize) -> Result<f64> {
    rmse_of_errors(&trace.errors(), skip_transient)
}

pub fn rmse_of_errors(errors: &[f64], skip_transient: usize) -> Result<f64> {
    let kept = errors.get(skip_transient..).unwrap_or(&[]);
    if kept.is_empty() {
        return Err(Error::InsufficientData(format!(
            "no steps left after skipping {skip_transient} of {}",
            errors.len()
        )));
    }
    Ok((kept.iter().map(|e| e * e).sum::<f64>() / kept.len() as f64).sqrt())
}

/// Mean and sample standard deviation (0 for a single value).
pub fn mean_std(values: &[f64]) -> (f64, f64) {
    let n = values.len() as f64;
    let mean = values.iter().sum::<f64>() / n;
    if values.len() < 2 {
        return (mean, 0.0);
    }
    let var = values.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (n - 1.0);
    (mean, var.sqrt())
}
