//! Metrics, parameter sweeps and file formats.

pub mod io;
mod metrics;
mod sweep;

pub use metrics::{mean_std, rmse, rmse_of_errors, DEFAULT_SKIP_TRANSIENT};
pub use sweep::{run_sweep, SweepAxis, SweepEntry, SweepResult, SweepSpec, SweepSummary};
