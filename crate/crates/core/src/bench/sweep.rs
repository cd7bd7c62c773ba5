use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::metrics::{mean_std, rmse};
use crate::filters::{DiagonalCovariance, EstimatorConfig};
use crate::sim::{run_scenario, ScenarioConfig};
use crate::{Error, Result};

/// The parameter varied across a sweep, with its values.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SweepAxis {
    ParticleCount(Vec<usize>),
    SigmaObs(Vec<f64>),
    SigmaDist(Vec<f64>),
    Estimator(Vec<EstimatorConfig>),
}

impl SweepAxis {
    pub fn len(&self) -> usize {
        match self {
            SweepAxis::ParticleCount(v) => v.len(),
            SweepAxis::SigmaObs(v) | SweepAxis::SigmaDist(v) => v.len(),
            SweepAxis::Estimator(v) => v.len(),
        }
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn name(&self) -> &'static str {
        match self {
            SweepAxis::ParticleCount(_) => "particle_count",
            SweepAxis::SigmaObs(_) => "sigma_obs",
            SweepAxis::SigmaDist(_) => "sigma_dist",
            SweepAxis::Estimator(_) => "estimator",
        }
    }

    pub fn label(&self, index: usize) -> String {
        match self {
            SweepAxis::ParticleCount(v) => v[index].to_string(),
            SweepAxis::SigmaObs(v) | SweepAxis::SigmaDist(v) => v[index].to_string(),
            SweepAxis::Estimator(v) => {
                let name = v[index].kind().name();
                if v.iter().filter(|c| c.kind().name() == name).count() > 1 {
                    format!("{name}#{index}")
                } else {
                    name.to_string()
                }
            }
        }
    }

    /// `base` with the `index`-th value substituted.
    pub fn apply(&self, base: &ScenarioConfig, index: usize) -> Result<ScenarioConfig> {
        let mut cfg = base.clone();
        match self {
            SweepAxis::ParticleCount(v) => match &mut cfg.filter {
                EstimatorConfig::DualMcl(c) => c.m = v[index],
                EstimatorConfig::StandardPf(c) => c.m = v[index],
                EstimatorConfig::Ekf(_) => {
                    return Err(Error::Config("particle_count sweep needs a particle filter".into()))
                }
            },
            SweepAxis::SigmaObs(v) => match &mut cfg.filter {
                EstimatorConfig::DualMcl(c) => c.q_obs = DiagonalCovariance::isotropic(v[index])?,
                _ => return Err(Error::Config("sigma_obs sweep needs the dual_mcl estimator".into())),
            },
            SweepAxis::SigmaDist(v) => cfg.noise.sigma = [v[index]; 3],
            SweepAxis::Estimator(v) => cfg.filter = v[index],
        }
        Ok(cfg)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepSpec {
    pub base: ScenarioConfig,
    pub axis: SweepAxis,
    /// Runs per value; run `i` uses seed `base.seed + i`.
    pub repeats: usize,
    #[serde(default)]
    pub skip_transient: usize,
}

impl SweepSpec {
    pub fn validate(&self) -> Result<()> {
        if self.axis.is_empty() {
            return Err(Error::param("values", "sweep needs at least one value"));
        }
        if self.repeats == 0 {
            return Err(Error::param("repeats", "sweep needs at least one run per value"));
        }
        for i in 0..self.axis.len() {
            self.axis.apply(&self.base, i)?.validate()?;
        }
        Ok(())
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let spec: SweepSpec = serde_json::from_str(text)?;
        spec.validate()?;
        Ok(spec)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepEntry {
    pub value: String,
    pub seed: u64,
    pub rmse: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepSummary {
    pub value: String,
    pub runs: usize,
    pub mean_rmse: f64,
    pub std_rmse: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepResult {
    pub axis: String,
    pub entries: Vec<SweepEntry>,
    pub summary: Vec<SweepSummary>,
}

impl SweepResult {
    /// Aggregates raw entries per value, keeping first-seen value order.
    pub fn from_entries(axis: impl Into<String>, entries: Vec<SweepEntry>) -> Self {
        let mut order: Vec<String> = Vec::new();
        for e in &entries {
            if !order.contains(&e.value) {
                order.push(e.value.clone());
            }
        }
        let summary = order
            .into_iter()
            .map(|value| {
                let rmses: Vec<f64> = entries.iter().filter(|e| e.value == value).map(|e| e.rmse).collect();
                let (mean_rmse, std_rmse) = mean_std(&rmses);
                SweepSummary {
                    value,
                    runs: rmses.len(),
                    mean_rmse,
                    std_rmse,
                }
            })
            .collect();
        SweepResult {
            axis: axis.into(),
            entries,
            summary,
        }
    }

    pub fn mean_of(&self, value: &str) -> Option<f64> {
        self.summary.iter().find(|s| s.value == value).map(|s| s.mean_rmse)
    }
}

/// Runs every (value, repeat) combination in parallel and aggregates RMSE.
pub fn run_sweep(spec: &SweepSpec) -> Result<SweepResult> {
    spec.validate()?;
    let jobs: Vec<(usize, usize)> = (0..spec.axis.len())
        .flat_map(|v| (0..spec.repeats).map(move |r| (v, r)))
        .collect();
    let entries = jobs
        .par_iter()
        .map(|&(v, r)| {
            let mut cfg = spec.axis.apply(&spec.base, v)?;
            cfg.seed = spec.base.seed.wrapping_add(r as u64);
            let trace = run_scenario(&cfg)?;
            Ok(SweepEntry {
                value: spec.axis.label(v),
                seed: cfg.seed,
                rmse: rmse(&trace, spec.skip_transient)?,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(SweepResult::from_entries(spec.axis.name(), entries))
}
