//! Deterministic two-robot scenarios.
//!
//! Per step `k` (time `t = k Ts`) the loop senses, estimates, commands and
//! integrates, in that order:
//!
//! 1. ranges from the true relative position `r_k = p1 - p0`, corrupted by
//!    the range noise model;
//! 2. estimator update with those ranges and the anchor set-point applied
//!    over the previous interval (zero at `k = 0`);
//! 3. anchor set-point from its profile or the formation controller, tag
//!    set-point from its profile;
//! 4. deadbeat velocity tracking and one kinematic step for both robots.
//!
//! Two independent random streams are derived from the seed: one drives the
//! world (range and process noise), the other the estimator. Replaying logged
//! ranges with the same seed therefore reproduces the estimates exactly.

mod config;
mod profile;
mod scenario;

pub use config::{presets, AnchorActuation, RobotConfig, ScenarioConfig};
pub use profile::{velocity_profile_at, Axis, VelocityProfile};
pub use scenario::{
    estimator_rng, replay, run_scenario, run_scenario_with, world_rng, ScenarioTrace, StepRecord,
};
