use serde::{Deserialize, Serialize};

use crate::{Error, Result, Vec2};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Axis {
    X,
    Y,
}

/// Open-loop velocity set-point as a function of time.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", deny_unknown_fields)]
pub enum VelocityProfile {
    Constant(Vec2),
    /// `offset + amplitude * kappa(t)` on `axis`, where `kappa` is `+1` on
    /// even half-periods and `-1` on odd ones.
    SquareWave {
        amplitude: f64,
        period: f64,
        axis: Axis,
        #[serde(default = "Vec2::zeros")]
        offset: Vec2,
    },
    /// `(t_start, v)` segments; the latest segment with `t_start <= t` wins.
    Piecewise(Vec<(f64, Vec2)>),
}

impl VelocityProfile {
    pub fn validate(&self) -> Result<()> {
        match self {
            VelocityProfile::SquareWave { period, .. } if !(period.is_finite() && *period > 0.0) => {
                Err(Error::param("period", "square-wave period must be > 0"))
            }
            VelocityProfile::Piecewise(segs) if segs.is_empty() => {
                Err(Error::param("piecewise", "at least one segment is required"))
            }
            VelocityProfile::Piecewise(segs) if segs.windows(2).any(|w| w[0].0 > w[1].0) => {
                Err(Error::param("piecewise", "segment start times must be nondecreasing"))
            }
            _ => Ok(()),
        }
    }
}

pub fn velocity_profile_at(profile: &VelocityProfile, t: f64) -> Vec2 {
    match profile {
        VelocityProfile::Constant(v) => *v,
        VelocityProfile::SquareWave {
            amplitude,
            period,
            axis,
            offset,
        } => {
            let half = (t / (0.5 * period)).floor() as i64;
            let kappa = if half % 2 == 0 { 1.0 } else { -1.0 };
            let mut v = *offset;
            match axis {
                Axis::X => v.x += amplitude * kappa,
                Axis::Y => v.y += amplitude * kappa,
            }
            v
        }
        VelocityProfile::Piecewise(segs) => segs
            .iter()
            .take_while(|(start, _)| *start <= t)
            .last()
            .or_else(|| segs.first())
            .map(|(_, v)| *v)
            .unwrap_or_else(Vec2::zeros),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn square_wave_switches_each_half_period() {
        let p = VelocityProfile::SquareWave {
            amplitude: 1.2,
            period: 6.0,
            axis: Axis::Y,
            offset: Vec2::zeros(),
        };
        assert_eq!(velocity_profile_at(&p, 0.0), Vec2::new(0.0, 1.2));
        assert_eq!(velocity_profile_at(&p, 2.9), Vec2::new(0.0, 1.2));
        assert_eq!(velocity_profile_at(&p, 3.0), Vec2::new(0.0, -1.2));
        assert_eq!(velocity_profile_at(&p, 6.1), Vec2::new(0.0, 1.2));
        assert_eq!(velocity_profile_at(&p, 9.5), Vec2::new(0.0, -1.2));
    }

    #[test]
    fn square_wave_with_offset() {
        let p = VelocityProfile::SquareWave {
            amplitude: 4.0,
            period: 2.0,
            axis: Axis::X,
            offset: Vec2::new(0.0, 0.3),
        };
        assert_eq!(velocity_profile_at(&p, 0.5), Vec2::new(4.0, 0.3));
        assert_eq!(velocity_profile_at(&p, 1.5), Vec2::new(-4.0, 0.3));
    }

    #[test]
    fn constant_profile() {
        let p = VelocityProfile::Constant(Vec2::new(0.0, 0.3));
        for t in [0.0, 1.0, 1e4] {
            assert_eq!(velocity_profile_at(&p, t), Vec2::new(0.0, 0.3));
        }
    }

    #[test]
    fn piecewise_is_closed_on_the_left() {
        let p = VelocityProfile::Piecewise(vec![(0.0, Vec2::new(1.0, 0.0)), (5.0, Vec2::new(0.0, 1.0))]);
        assert_eq!(velocity_profile_at(&p, 4.999), Vec2::new(1.0, 0.0));
        assert_eq!(velocity_profile_at(&p, 5.0), Vec2::new(0.0, 1.0));
        assert_eq!(velocity_profile_at(&p, 50.0), Vec2::new(0.0, 1.0));
    }

    #[test]
    fn invalid_profiles() {
        let p = VelocityProfile::SquareWave {
            amplitude: 1.0,
            period: 0.0,
            axis: Axis::X,
            offset: Vec2::zeros(),
        };
        assert!(p.validate().is_err());
        assert!(VelocityProfile::Piecewise(vec![]).validate().is_err());
    }
}
