use rand::Rng;
use serde::{Deserialize, Serialize};

use super::dual_mcl::{dual_mcl_step, init_dual_mcl, DualMclConfig, FilterEstimate, FilterState, InitRegion};
use super::ekf::{ekf_step, init_ekf, EkfConfig, EkfState};
use super::standard_pf::{standard_pf_step, StandardPfConfig};
use crate::geometry::{AnchorLayout, RangeTriple};
use crate::{Error, Result, Vec2};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum EstimatorKind {
    DualMcl,
    StandardPf,
    Ekf,
}

impl EstimatorKind {
    pub fn name(&self) -> &'static str {
        match self {
            EstimatorKind::DualMcl => "dual_mcl",
            EstimatorKind::StandardPf => "standard_pf",
            EstimatorKind::Ekf => "ekf",
        }
    }
}

impl std::str::FromStr for EstimatorKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "dual_mcl" => Ok(EstimatorKind::DualMcl),
            "standard_pf" => Ok(EstimatorKind::StandardPf),
            "ekf" => Ok(EstimatorKind::Ekf),
            other => Err(Error::Config(format!(
                "unknown estimator `{other}` (expected dual_mcl, standard_pf or ekf)"
            ))),
        }
    }
}

impl std::fmt::Display for EstimatorKind {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.name())
    }
}

/// Estimator choice together with its parameters.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum EstimatorConfig {
    DualMcl(DualMclConfig),
    StandardPf(StandardPfConfig),
    Ekf(EkfConfig),
}

impl EstimatorConfig {
    pub fn kind(&self) -> EstimatorKind {
        match self {
            EstimatorConfig::DualMcl(_) => EstimatorKind::DualMcl,
            EstimatorConfig::StandardPf(_) => EstimatorKind::StandardPf,
            EstimatorConfig::Ekf(_) => EstimatorKind::Ekf,
        }
    }

    pub fn with_ts(mut self, ts: f64) -> Self {
        match &mut self {
            EstimatorConfig::DualMcl(c) => c.ts = ts,
            EstimatorConfig::StandardPf(c) => c.ts = ts,
            EstimatorConfig::Ekf(c) => c.ts = ts,
        }
        self
    }

    pub fn validate(&self) -> Result<()> {
        match self {
            EstimatorConfig::DualMcl(c) => c.validate(),
            EstimatorConfig::StandardPf(c) => c.validate(),
            EstimatorConfig::Ekf(c) => c.validate(),
        }
    }
}

/// A running estimator of any kind.
#[derive(Debug, Clone)]
pub enum Estimator {
    DualMcl { state: FilterState, config: DualMclConfig },
    StandardPf { state: FilterState, config: StandardPfConfig },
    Ekf { state: EkfState, config: EkfConfig },
}

impl Estimator {
    pub fn new<R: Rng + ?Sized>(config: &EstimatorConfig, init: &InitRegion, rng: &mut R) -> Result<Self> {
        config.validate()?;
        Ok(match *config {
            EstimatorConfig::DualMcl(config) => Estimator::DualMcl {
                state: init_dual_mcl(init, config.m, rng)?,
                config,
            },
            EstimatorConfig::StandardPf(config) => Estimator::StandardPf {
                state: init_dual_mcl(init, config.m, rng)?,
                config,
            },
            EstimatorConfig::Ekf(config) => Estimator::Ekf {
                state: init_ekf(init, config.init_velocity_var)?,
                config,
            },
        })
    }

    pub fn kind(&self) -> EstimatorKind {
        match self {
            Estimator::DualMcl { .. } => EstimatorKind::DualMcl,
            Estimator::StandardPf { .. } => EstimatorKind::StandardPf,
            Estimator::Ekf { .. } => EstimatorKind::Ekf,
        }
    }

    /// Processes one epoch of ranges; `v0_k` is the anchor velocity over the
    /// interval leading up to it.
    pub fn step<R: Rng + ?Sized>(
        &mut self,
        ranges: &RangeTriple,
        v0_k: &Vec2,
        layout: &AnchorLayout,
        rng: &mut R,
    ) -> Result<FilterEstimate> {
        match self {
            Estimator::DualMcl { state, config } => {
                let (next, est) = dual_mcl_step(state, ranges, v0_k, config, layout, rng)?;
                *state = next;
                Ok(est)
            }
            Estimator::StandardPf { state, config } => {
                let (next, est) = standard_pf_step(state, ranges, v0_k, config, layout, rng)?;
                *state = next;
                Ok(est)
            }
            Estimator::Ekf { state, config } => {
                let (next, est) = ekf_step(
                    state,
                    ranges,
                    v0_k,
                    &config.process_cov(),
                    &config.meas_cov(),
                    config.ts,
                    layout,
                );
                *state = next;
                Ok(est)
            }
        }
    }
}
