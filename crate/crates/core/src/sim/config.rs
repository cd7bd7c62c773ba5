use serde::{Deserialize, Serialize};

use super::profile::VelocityProfile;
use crate::control::FormationGoal;
use crate::filters::{EstimatorConfig, EstimatorKind, InitRegion};
use crate::geometry::{anchor_positions, AnchorLayout};
use crate::motion::{MotionLimits, ProcessNoise, RobotState};
use crate::sensing::RangeNoiseModel;
use crate::{Error, Result, Vec2};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RobotConfig {
    pub position: Vec2,
    #[serde(default = "Vec2::zeros")]
    pub velocity: Vec2,
    pub limits: MotionLimits,
}

impl RobotConfig {
    pub fn initial_state(&self) -> RobotState {
        RobotState::new(self.position, self.velocity, self.limits)
    }
}

/// Source of the anchor robot's velocity set-points.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum AnchorActuation {
    /// Externally commanded, open loop.
    Profile(VelocityProfile),
    /// Closed loop on the relative-position estimate.
    Formation(FormationGoal),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScenarioConfig {
    /// Loop rate in Hz shared by sensing, estimation and control.
    pub f: f64,
    pub n_steps: usize,
    /// Anchor triangle leg length, meters.
    pub a: f64,
    pub noise: RangeNoiseModel,
    /// Velocity random walk applied to both robots.
    #[serde(default)]
    pub process_noise: ProcessNoise,
    pub anchor: RobotConfig,
    pub anchor_actuation: AnchorActuation,
    pub tag: RobotConfig,
    pub tag_profile: VelocityProfile,
    pub filter: EstimatorConfig,
    pub init_region: InitRegion,
    pub seed: u64,
}

impl ScenarioConfig {
    pub fn ts(&self) -> f64 {
        1.0 / self.f
    }

    pub fn layout(&self) -> Result<AnchorLayout> {
        anchor_positions(self.a)
    }

    /// Estimator parameters with the sample time filled in.
    pub fn estimator(&self) -> EstimatorConfig {
        self.filter.with_ts(self.ts())
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.f.is_finite() && self.f > 0.0) {
            return Err(Error::param("f", format!("loop rate must be > 0, got {}", self.f)));
        }
        if self.n_steps == 0 {
            return Err(Error::param("n_steps", "at least one step is required"));
        }
        self.layout()?;
        self.noise.validate()?;
        ProcessNoise::new(self.process_noise.variance)?;
        self.anchor.limits.validate()?;
        self.tag.limits.validate()?;
        self.tag_profile.validate()?;
        match &self.anchor_actuation {
            AnchorActuation::Profile(p) => p.validate()?,
            AnchorActuation::Formation(g) => g.validate()?,
        }
        self.init_region.validate()?;
        self.estimator().validate()
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let cfg: ScenarioConfig = serde_json::from_str(text)?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }
}

/// Scenario configurations used throughout the tests, the acceptance suite
/// and the CLI.
pub mod presets {
    use super::*;
    use crate::filters::{DiagonalCovariance, DualMclConfig, EkfConfig, StandardPfConfig};
    use crate::filters::BandwidthRule;
    use crate::sim::profile::Axis;

    pub const CASE1_INIT_MIN: [f64; 2] = [-4.2, -0.2];
    pub const CASE1_INIT_MAX: [f64; 2] = [-0.2, 3.8];

    pub fn case1_init_region() -> InitRegion {
        InitRegion::Box {
            min: Vec2::from(CASE1_INIT_MIN),
            max: Vec2::from(CASE1_INIT_MAX),
        }
    }

    pub fn dual_mcl(m: usize, sigma_obs: f64, q_1mot: f64) -> EstimatorConfig {
        EstimatorConfig::DualMcl(DualMclConfig {
            m,
            q_obs: DiagonalCovariance::isotropic(sigma_obs).expect("finite sigma"),
            q_1mot: DiagonalCovariance::new(q_1mot, q_1mot).expect("finite variance"),
            ts: 0.0,
            bandwidth: BandwidthRule::Scott,
        })
    }

    pub fn standard_pf(m: usize, q_1mot: f64, range_sigma: f64) -> EstimatorConfig {
        EstimatorConfig::StandardPf(StandardPfConfig {
            m,
            q_1mot: DiagonalCovariance::new(q_1mot, q_1mot).expect("finite variance"),
            range_sigma: [range_sigma; 3],
            ts: 0.0,
        })
    }

    pub fn ekf(position_var: f64, velocity_var: f64, range_sigma: f64) -> EstimatorConfig {
        EstimatorConfig::Ekf(EkfConfig {
            process_var: [position_var, position_var, velocity_var, velocity_var],
            range_sigma: [range_sigma; 3],
            init_velocity_var: 1.0,
            ts: 0.0,
        })
    }

    /// Externally actuated robots: f = 10 Hz, a = 0.44 m, sigma_dist = 0.05 m,
    /// v0 = [0, 0.2], v1 = [0, 0.3], r(0) = [-2, 2], uniform initial belief
    /// over [-4.2, -0.2] x [-0.2, 3.8].
    pub fn case1() -> ScenarioConfig {
        let limits = MotionLimits::symmetric(2.0, 5.0);
        ScenarioConfig {
            f: 10.0,
            n_steps: 200,
            a: 0.44,
            noise: RangeNoiseModel::isotropic(0.05).expect("valid noise"),
            process_noise: ProcessNoise::new(Vec2::repeat(1e-4)).expect("valid noise"),
            anchor: RobotConfig {
                position: Vec2::zeros(),
                velocity: Vec2::zeros(),
                limits,
            },
            anchor_actuation: AnchorActuation::Profile(VelocityProfile::Constant(Vec2::new(0.0, 0.2))),
            tag: RobotConfig {
                position: Vec2::new(-2.0, 2.0),
                velocity: Vec2::zeros(),
                limits,
            },
            tag_profile: VelocityProfile::Constant(Vec2::new(0.0, 0.3)),
            filter: dual_mcl(200, 1.0, 0.5),
            init_region: case1_init_region(),
            seed: 1,
        }
    }

    /// Both robots hover, ranges are exact.
    pub fn static_zero_noise() -> ScenarioConfig {
        ScenarioConfig {
            n_steps: 30,
            noise: RangeNoiseModel::noiseless(),
            process_noise: ProcessNoise::zero(),
            anchor_actuation: AnchorActuation::Profile(VelocityProfile::Constant(Vec2::zeros())),
            tag_profile: VelocityProfile::Constant(Vec2::zeros()),
            ..case1()
        }
    }

    /// Agile tag: `v1 = [4 kappa, 0.3]`, kappa switching every half period.
    pub fn agile() -> ScenarioConfig {
        let mut cfg = case1();
        cfg.tag.limits = MotionLimits::symmetric(5.0, 40.0);
        cfg.tag_profile = VelocityProfile::SquareWave {
            amplitude: 4.0,
            period: AGILE_PERIOD_S,
            axis: Axis::X,
            offset: Vec2::new(0.0, 0.3),
        };
        cfg.filter = dual_mcl(200, 1.0, AGILE_Q_1MOT);
        cfg
    }

    /// The three estimators on the agile tag with a shared tag-motion prior
    /// `Q_1mot = AGILE_Q_1MOT * I`. The range-based baselines get the true
    /// range noise; the EKF gets velocity process variance `Q_1mot` per step
    /// and position variance `Q_1mot * Ts^2`.
    pub fn agile_estimators() -> [EstimatorConfig; 3] {
        let cfg = agile();
        let ts = cfg.ts();
        let sigma = cfg.noise.sigma[0];
        [
            dual_mcl(200, 1.0, AGILE_Q_1MOT),
            standard_pf(200, AGILE_Q_1MOT, sigma),
            ekf(AGILE_Q_1MOT * ts * ts, AGILE_Q_1MOT, sigma),
        ]
    }

    /// Parameters for an estimator of `kind` on `cfg`: the configured filter
    /// when it already has that kind, otherwise 200 particles, `Q_1mot = 0.5 I`
    /// and, for the range-based baselines, the configured range noise.
    pub fn estimator_for(kind: EstimatorKind, cfg: &ScenarioConfig) -> EstimatorConfig {
        if cfg.filter.kind() == kind {
            return cfg.filter;
        }
        let q = 0.5;
        let sigma = cfg.noise.sigma.iter().cloned().fold(0.0, f64::max);
        let sigma = if sigma > 0.0 { sigma } else { 0.05 };
        let ts = cfg.ts();
        match kind {
            EstimatorKind::DualMcl => dual_mcl(200, 1.0, q),
            EstimatorKind::StandardPf => standard_pf(200, q, sigma),
            EstimatorKind::Ekf => ekf(q * ts * ts, q, sigma),
        }
    }

    /// Square-wave period of the agile tag, seconds.
    pub const AGILE_PERIOD_S: f64 = 2.0;
    /// Tag velocity spread assumed by the particle filters on the agile tag.
    pub const AGILE_Q_1MOT: f64 = 4.0;

    /// Closed-loop formation keeping at f = 3.3 Hz with `r_des = [2, 2]`,
    /// `K_v = 1`, 0.2 m dead-zone and a tag moving in a straight line.
    pub fn formation_straight() -> ScenarioConfig {
        let limits = MotionLimits::symmetric(2.0, 5.0);
        ScenarioConfig {
            f: 3.3,
            n_steps: 120,
            a: 0.44,
            noise: RangeNoiseModel::isotropic(0.05).expect("valid noise"),
            process_noise: ProcessNoise::new(Vec2::repeat(1e-4)).expect("valid noise"),
            anchor: RobotConfig {
                position: Vec2::zeros(),
                velocity: Vec2::zeros(),
                limits,
            },
            anchor_actuation: AnchorActuation::Formation(FormationGoal {
                r_des: Vec2::new(2.0, 2.0),
                k_v: 1.0,
                deadzone: 0.2,
                v_limit: Vec2::repeat(2.0),
            }),
            tag: RobotConfig {
                position: Vec2::new(2.0, 2.0),
                velocity: Vec2::zeros(),
                limits,
            },
            tag_profile: VelocityProfile::Constant(Vec2::new(0.0, 0.3)),
            filter: dual_mcl(400, 1.0, 0.5),
            init_region: InitRegion::Box {
                min: Vec2::new(0.0, 0.0),
                max: Vec2::new(4.0, 4.0),
            },
            seed: 1,
        }
    }

    /// Formation keeping with the tag switching `v1 = [0, 1.2 kappa]` every 3 s.
    /// The filter uses a larger `Q_1mot` to follow the velocity reversals.
    pub fn formation_periodic() -> ScenarioConfig {
        ScenarioConfig {
            filter: dual_mcl(400, 1.0, 8.0),
            tag_profile: VelocityProfile::SquareWave {
                amplitude: 1.2,
                period: 6.0,
                axis: Axis::Y,
                offset: Vec2::zeros(),
            },
            ..formation_straight()
        }
    }

    pub fn by_name(name: &str) -> Option<ScenarioConfig> {
        match name {
            "case1" => Some(case1()),
            "static" => Some(static_zero_noise()),
            "agile" => Some(agile()),
            "formation_straight" => Some(formation_straight()),
            "formation_periodic" => Some(formation_periodic()),
            _ => None,
        }
    }

    pub const NAMES: [&str; 5] = ["case1", "static", "agile", "formation_straight", "formation_periodic"];
}
