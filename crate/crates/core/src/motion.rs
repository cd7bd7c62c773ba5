//! Planar double-integrator kinematics with velocity and acceleration limits.
//!
//! Headings are held constant, so every robot frame stays axis-aligned with
//! the global frame and relative positions need no rotation.

use rand::Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::{Error, Result, Vec2};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MotionLimits {
    pub v_min: Vec2,
    pub v_max: Vec2,
    pub a_min: Vec2,
    pub a_max: Vec2,
}

impl MotionLimits {
    /// Symmetric limits `|v| <= v_abs`, `|a| <= a_abs` on both axes.
    pub fn symmetric(v_abs: f64, a_abs: f64) -> Self {
        MotionLimits {
            v_min: Vec2::repeat(-v_abs),
            v_max: Vec2::repeat(v_abs),
            a_min: Vec2::repeat(-a_abs),
            a_max: Vec2::repeat(a_abs),
        }
    }

    pub fn validate(&self) -> Result<()> {
        let ordered = |lo: &Vec2, hi: &Vec2| lo.iter().zip(hi.iter()).all(|(l, h)| l <= h);
        if !ordered(&self.v_min, &self.v_max) {
            return Err(Error::param("limits", "v_min must not exceed v_max"));
        }
        if !ordered(&self.a_min, &self.a_max) {
            return Err(Error::param("limits", "a_min must not exceed a_max"));
        }
        Ok(())
    }

    pub fn clamp_velocity(&self, v: &Vec2) -> Vec2 {
        clamp(v, &self.v_min, &self.v_max)
    }

    pub fn clamp_accel(&self, a: &Vec2) -> Vec2 {
        clamp(a, &self.a_min, &self.a_max)
    }
}

fn clamp(v: &Vec2, lo: &Vec2, hi: &Vec2) -> Vec2 {
    Vec2::new(v.x.clamp(lo.x, hi.x), v.y.clamp(lo.y, hi.y))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RobotState {
    pub p: Vec2,
    pub v: Vec2,
    pub limits: MotionLimits,
}

impl RobotState {
    pub fn new(p: Vec2, v: Vec2, limits: MotionLimits) -> Self {
        RobotState {
            p,
            v: limits.clamp_velocity(&v),
            limits,
        }
    }
}

/// Random-walk velocity noise, diagonal covariance in (m/s)^2.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
#[serde(transparent)]
pub struct ProcessNoise {
    pub variance: Vec2,
}

impl ProcessNoise {
    pub fn new(variance: Vec2) -> Result<Self> {
        if variance.iter().any(|v| !(v.is_finite() && *v >= 0.0)) {
            return Err(Error::param("process_noise", "variances must be finite and >= 0"));
        }
        Ok(ProcessNoise { variance })
    }

    pub fn zero() -> Self {
        ProcessNoise::default()
    }
}

/// Advances one robot by `ts` seconds under `accel_cmd`.
///
/// The command is clamped into the acceleration limits first; noise enters
/// the velocity only, which is then saturated.
pub fn step_robot<R: Rng + ?Sized>(
    state: &RobotState,
    accel_cmd: &Vec2,
    ts: f64,
    noise: &ProcessNoise,
    rng: &mut R,
) -> RobotState {
    let a = state.limits.clamp_accel(accel_cmd);
    let p = state.p + state.v * ts + a * (0.5 * ts * ts);
    let delta = Vec2::new(
        noise.variance.x.sqrt() * rng.sample::<f64, _>(StandardNormal),
        noise.variance.y.sqrt() * rng.sample::<f64, _>(StandardNormal),
    );
    let v = state.limits.clamp_velocity(&(state.v + a * ts + delta));
    RobotState {
        p,
        v,
        limits: state.limits,
    }
}

/// Deadbeat velocity tracking: the acceleration that reaches `v_des` in one
/// step, limited by the acceleration bounds.
pub fn velocity_tracking_accel(v: &Vec2, v_des: &Vec2, ts: f64, limits: &MotionLimits) -> Vec2 {
    limits.clamp_accel(&((v_des - v) / ts))
}

/// Relative position `r = p1 - p0` after one step.
pub fn relative_dynamics(r: &Vec2, v0: &Vec2, v1: &Vec2, a0: &Vec2, a1: &Vec2, ts: f64) -> Vec2 {
    r + (v1 - v0) * ts + (a1 - a0) * (0.5 * ts * ts)
}
