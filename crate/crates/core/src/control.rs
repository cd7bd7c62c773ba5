//! Proportional formation keeping for the anchor robot.

use serde::{Deserialize, Serialize};

use crate::{Error, Result, Vec2};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FormationGoal {
    /// Desired relative position of the tag in the anchor frame.
    pub r_des: Vec2,
    /// Proportional gain, 1/s.
    pub k_v: f64,
    /// Per-axis half-width of the error band that commands zero velocity.
    pub deadzone: f64,
    /// Per-axis magnitude limit of the commanded velocity.
    pub v_limit: Vec2,
}

impl FormationGoal {
    pub fn validate(&self) -> Result<()> {
        if !(self.k_v.is_finite() && self.k_v > 0.0) {
            return Err(Error::param("k_v", "gain must be > 0"));
        }
        if !(self.deadzone.is_finite() && self.deadzone >= 0.0) {
            return Err(Error::param("deadzone", "dead-zone must be >= 0"));
        }
        if self.v_limit.iter().any(|v| !(*v >= 0.0)) {
            return Err(Error::param("v_limit", "velocity limit must be >= 0"));
        }
        Ok(())
    }
}

/// Anchor velocity set-point from the relative-position estimate.
///
/// With `e = r_des - r_hat` the command is `-K_v e` per axis, zero when
/// `|e_axis| <= deadzone`, and clamped to `v_limit`. The minus sign follows
/// from `r = p1 - p0`: moving the anchor along `+e` shrinks `r`.
pub fn formation_control(r_hat: &Vec2, goal: &FormationGoal) -> Vec2 {
    let e = goal.r_des - r_hat;
    Vec2::from_fn(|i, _| {
        if e[i].abs() <= goal.deadzone {
            0.0
        } else {
            (-goal.k_v * e[i]).clamp(-goal.v_limit[i], goal.v_limit[i])
        }
    })
}
