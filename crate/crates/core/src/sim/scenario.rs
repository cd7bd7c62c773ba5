use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use super::config::{AnchorActuation, ScenarioConfig};
use super::profile::velocity_profile_at;
use crate::control::formation_control;
use crate::filters::{Estimator, EstimatorConfig, EstimatorKind, FilterEstimate, InitRegion};
use crate::geometry::{construct_measurement, true_ranges, AnchorLayout, RangeTriple};
use crate::motion::{step_robot, velocity_tracking_accel, RobotState};
use crate::sensing::corrupt_ranges;
use crate::{Error, Result, Vec2};

/// Random stream for range and process noise.
pub fn world_rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Random stream for the estimator, independent of [`world_rng`].
pub fn estimator_rng(seed: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(1);
    rng
}

/// Everything recorded at one step, before the robots move.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StepRecord {
    pub k: usize,
    pub t: f64,
    pub r_true: Vec2,
    pub ranges: RangeTriple,
    pub r_meas: Vec2,
    pub r_hat: Vec2,
    pub v1_hat: Vec2,
    /// Anchor set-point issued at this step.
    pub v0_cmd: Vec2,
    pub v1_cmd: Vec2,
    pub anchor: RobotState,
    pub tag: RobotState,
    /// `|r_hat - r_true|`.
    pub err: f64,
}

impl StepRecord {
    /// Error on the full state `[r; v1]` against the tag's true velocity.
    pub fn state_error(&self) -> f64 {
        let dr = self.r_hat - self.r_true;
        let dv = self.v1_hat - self.tag.v;
        (dr.norm_squared() + dv.norm_squared()).sqrt()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ScenarioTrace {
    pub estimator: EstimatorKind,
    pub ts: f64,
    pub steps: Vec<StepRecord>,
}

impl ScenarioTrace {
    pub fn len(&self) -> usize {
        self.steps.len()
    }

    pub fn is_empty(&self) -> bool {
        self.steps.is_empty()
    }

    pub fn errors(&self) -> Vec<f64> {
        self.steps.iter().map(|s| s.err).collect()
    }
}

pub fn run_scenario(config: &ScenarioConfig) -> Result<ScenarioTrace> {
    match &config.anchor_actuation {
        AnchorActuation::Profile(profile) => {
            let profile = profile.clone();
            run_scenario_with(config, move |_, t, _| velocity_profile_at(&profile, t))
        }
        AnchorActuation::Formation(goal) => {
            let goal = *goal;
            run_scenario_with(config, move |_, _, r_hat| formation_control(r_hat, &goal))
        }
    }
}

/// Runs `config` with the anchor set-point supplied by
/// `anchor_command(k, t, r_hat)`; `config.anchor_actuation` is ignored.
pub fn run_scenario_with<F>(config: &ScenarioConfig, mut anchor_command: F) -> Result<ScenarioTrace>
where
    F: FnMut(usize, f64, &Vec2) -> Vec2,
{
    config.validate()?;
    let ts = config.ts();
    let layout = config.layout()?;
    let mut world = world_rng(config.seed);
    let mut filter_rng = estimator_rng(config.seed);
    let mut estimator = Estimator::new(&config.estimator(), &config.init_region, &mut filter_rng)?;

    let mut anchor = config.anchor.initial_state();
    let mut tag = config.tag.initial_state();
    let mut v0_prev = Vec2::zeros();
    let mut steps = Vec::with_capacity(config.n_steps);

    for k in 0..config.n_steps {
        let t = k as f64 * ts;
        let r_true = tag.p - anchor.p;
        let mut ranges = corrupt_ranges(&true_ranges(&r_true, &layout), &config.noise, &mut world);
        ranges.step = k;
        let r_meas = construct_measurement(&ranges, &layout)?.r_meas;

        let est = estimator.step(&ranges, &v0_prev, &layout, &mut filter_rng)?;

        let v0_cmd = anchor_command(k, t, &est.r_hat);
        let v1_cmd = velocity_profile_at(&config.tag_profile, t);

        let record = StepRecord {
            k,
            t,
            r_true,
            ranges,
            r_meas,
            r_hat: est.r_hat,
            v1_hat: est.v1_hat,
            v0_cmd,
            v1_cmd,
            anchor,
            tag,
            err: (est.r_hat - r_true).norm(),
        };
        check_finite(&record)?;
        steps.push(record);

        let a0 = velocity_tracking_accel(&anchor.v, &v0_cmd, ts, &anchor.limits);
        let a1 = velocity_tracking_accel(&tag.v, &v1_cmd, ts, &tag.limits);
        anchor = step_robot(&anchor, &a0, ts, &config.process_noise, &mut world);
        tag = step_robot(&tag, &a1, ts, &config.process_noise, &mut world);
        v0_prev = v0_cmd;
    }

    Ok(ScenarioTrace {
        estimator: estimator.kind(),
        ts,
        steps,
    })
}

fn check_finite(r: &StepRecord) -> Result<()> {
    let fields: [(&str, &[f64]); 6] = [
        ("true relative position", r.r_true.as_slice()),
        ("ranges", &r.ranges.d),
        ("constructed measurement", r.r_meas.as_slice()),
        ("position estimate", r.r_hat.as_slice()),
        ("velocity estimate", r.v1_hat.as_slice()),
        ("anchor command", r.v0_cmd.as_slice()),
    ];
    for (what, values) in fields {
        if values.iter().any(|v| !v.is_finite()) {
            return Err(Error::NonFinite {
                step: r.k,
                what: what.to_string(),
            });
        }
    }
    Ok(())
}

/// Re-runs an estimator over logged ranges.
///
/// `v0_cmds[k]` is the anchor set-point issued at step `k`; the estimator at
/// step `k` sees `v0_cmds[k - 1]`, matching [`run_scenario`].
pub fn replay(
    ranges: &[RangeTriple],
    v0_cmds: &[Vec2],
    config: &EstimatorConfig,
    init: &InitRegion,
    layout: &AnchorLayout,
    seed: u64,
) -> Result<Vec<FilterEstimate>> {
    if ranges.len() != v0_cmds.len() {
        return Err(Error::LengthMismatch {
            what: "ranges vs anchor commands",
            left: ranges.len(),
            right: v0_cmds.len(),
        });
    }
    let mut rng = estimator_rng(seed);
    let mut estimator = Estimator::new(config, init, &mut rng)?;
    let mut v0_prev = Vec2::zeros();
    let mut out = Vec::with_capacity(ranges.len());
    for (r, v0) in ranges.iter().zip(v0_cmds) {
        out.push(estimator.step(r, &v0_prev, layout, &mut rng)?);
        v0_prev = *v0;
    }
    Ok(out)
}
