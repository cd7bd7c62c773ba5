//! Relative localization of two planar robots from three on-board UWB ranges.
//!
//! The anchor robot carries three UWB anchors on a right triangle with leg `a`
//! and estimates the planar position of a tag robot in its own frame. The crate
//! provides:
//!
//! * [`geometry`]: anchor layout, forward range model and the area-ratio
//!   reconstruction of a relative position from three ranges.
//! * [`sensing`]: range noise synthesis and bias/variance calibration.
//! * [`motion`]: saturated double-integrator kinematics and velocity tracking.
//! * [`filters`]: the dual Monte-Carlo localization filter together with a
//!   motion-proposal particle filter and an EKF baseline.
//! * [`control`]: proportional formation control with a dead-zone.
//! * [`sim`]: deterministic two-robot scenarios producing per-step traces.
//! * [`bench`]: RMSE metrics, parameter sweeps and file I/O.

pub mod bench;
pub mod control;
pub mod error;
pub mod filters;
pub mod geometry;
pub mod motion;
pub mod sensing;
pub mod sim;

pub use error::{Error, Result};

/// Planar vector in meters (positions) or m/s (velocities).
pub type Vec2 = nalgebra::Vector2<f64>;

pub use bench::{rmse, run_sweep, SweepAxis, SweepResult, SweepSpec};
pub use control::{formation_control, FormationGoal};
pub use filters::{
    DiagonalCovariance, DualMclConfig, EkfConfig, EkfState, Estimator, EstimatorConfig, EstimatorKind,
    FilterEstimate, FilterState, InitRegion, Particle, ParticleSet, StandardPfConfig,
};
pub use geometry::{
    anchor_positions, construct_measurement, true_ranges, AnchorLayout, ConstructedMeasurement,
    RangeTriple,
};
pub use motion::{MotionLimits, ProcessNoise, RobotState};
pub use sensing::{calibrate, corrupt_ranges, CalibrationRecord, RangeNoiseModel};
pub use sim::{run_scenario, ScenarioConfig, ScenarioTrace, VelocityProfile};
