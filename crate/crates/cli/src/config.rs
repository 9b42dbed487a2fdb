//! Strict JSON run configuration shared by every subcommand.
//!
//! Unknown keys are rejected everywhere (serde names the offending key in
//! its error), so typos fail loudly instead of silently running with
//! defaults. Sections not needed by a given subcommand may be omitted;
//! the subcommand that needs a missing section reports a config error.

use std::path::PathBuf;

use serde::Deserialize;

use energentic::dynamics::InitialConditions;
use energentic::environment::EnvironmentSpec;
use energentic::error::Error;
use energentic::metrics::Forecaster;
use energentic::policy::{RewardSpec, TrainingSpec};
use energentic::simulation::ModeThresholds;

/// Which controller drives episodes.
#[derive(Debug, Clone, Deserialize)]
#[serde(rename_all = "snake_case", deny_unknown_fields)]
pub enum PolicySelector {
    FixedCompute,
    GreedyHarvest,
    QLearning {
        /// Trained table to load; required by `run` and `sweep`, ignored
        /// by `train` (which always writes a fresh table).
        #[serde(default)]
        qtable_path: Option<PathBuf>,
        /// Evaluation exploration rate; defaults to fully greedy.
        #[serde(default)]
        epsilon: f64,
    },
}

impl PolicySelector {
    /// Stable lowercase name for manifests.
    pub fn label(&self) -> &'static str {
        match self {
            PolicySelector::FixedCompute => "fixed_compute",
            PolicySelector::GreedyHarvest => "greedy_harvest",
            PolicySelector::QLearning { .. } => "q_learning",
        }
    }
}

/// An inclusive, linearly spaced axis of `count` points.
#[derive(Debug, Clone, Copy, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RangeSpec {
    pub min: f64,
    pub max: f64,
    pub count: u32,
}

impl RangeSpec {
    pub fn validate(&self, key: &str) -> Result<(), Error> {
        if !(self.min.is_finite() && self.max.is_finite()) {
            return Err(Error::invalid(key, "bounds must be finite"));
        }
        if self.count < 1 {
            return Err(Error::invalid(format!("{key}.count"), "must be at least 1"));
        }
        if self.min >= self.max {
            return Err(Error::invalid(key, "min must be strictly below max"));
        }
        Ok(())
    }

    /// The axis values, strictly increasing; a single-point axis holds
    /// just `min`.
    pub fn axis(&self) -> Vec<f64> {
        if self.count == 1 {
            return vec![self.min];
        }
        let step = (self.max - self.min) / (self.count - 1) as f64;
        (0..self.count).map(|i| self.min + step * i as f64).collect()
    }
}

/// Initial-condition grid for the `sweep` subcommand.
#[derive(Debug, Clone, Copy, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepSection {
    /// Starting-energy axis.
    pub e0: RangeSpec,
    /// Starting-temperature axis.
    pub t0: RangeSpec,
}

/// Inputs for the `compare` subcommand.
#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CompareSection {
    /// Trained table for the survival policy lane.
    pub qtable_path: PathBuf,
}

/// Everything a subcommand needs, in one file.
#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub environment: EnvironmentSpec,
    pub policy: PolicySelector,
    #[serde(default)]
    pub reward: RewardSpec,
    #[serde(default)]
    pub forecaster: Forecaster,
    #[serde(default)]
    pub thresholds: ModeThresholds,
    pub init: InitialConditions,
    pub seed: u64,
    /// Default artifact directory; `--out` overrides it.
    #[serde(default)]
    pub output_dir: Option<PathBuf>,
    #[serde(default)]
    pub training: Option<TrainingSpec>,
    #[serde(default)]
    pub sweep: Option<SweepSection>,
    #[serde(default)]
    pub compare: Option<CompareSection>,
}

impl RunConfig {
    /// Validate every section that is present.
    pub fn validate(&self) -> Result<(), Error> {
        self.environment.validate()?;
        self.init.validate(&self.environment)?;
        self.reward.validate()?;
        self.forecaster.validate()?;
        self.thresholds.validate()?;
        if let PolicySelector::QLearning { epsilon, .. } = &self.policy {
            if !(epsilon.is_finite() && (0.0..=1.0).contains(epsilon)) {
                return Err(Error::invalid(
                    "policy.q_learning.epsilon",
                    "must be in [0, 1]",
                ));
            }
        }
        if let Some(training) = &self.training {
            training.validate()?;
        }
        if let Some(sweep) = &self.sweep {
            sweep.e0.validate("sweep.e0")?;
            sweep.t0.validate("sweep.t0")?;
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn minimal_json() -> String {
        r#"{
            "environment": {
                "width": 4, "height": 4,
                "harvest_field": {"spatial": {"constant": 0.5}},
                "dissipation_field": {"spatial": {"constant": 1.0}},
                "eta": 0.9, "alpha": 1.0, "beta": 0.5,
                "t_ambient": 20.0, "t_crit": 40.0,
                "action_costs": {"idle": 0.01, "compute": 0.3, "move": 0.1},
                "action_heat": {"idle": 0.0, "compute": 2.0, "move": 0.5},
                "gain_factors": {"idle": 1.0, "compute": 0.6, "move": 0.3},
                "max_steps": 50
            },
            "policy": "fixed_compute",
            "init": {"x": 1, "y": 1, "energy": 1.0, "temperature": 20.0},
            "seed": 7
        }"#
        .to_string()
    }

    #[test]
    fn minimal_config_parses_with_defaults() {
        let config: RunConfig = serde_json::from_str(&minimal_json()).unwrap();
        config.validate().unwrap();
        assert_eq!(config.seed, 7);
        assert_eq!(config.reward.alive_bonus, 1.0);
        assert_eq!(config.forecaster, Forecaster::RateExtrapolation { window: 10 });
        assert!(config.training.is_none());
        assert!(config.output_dir.is_none());
        // e_cap was omitted: it defaults.
        assert_eq!(config.environment.e_cap, 5.0);
    }

    #[test]
    fn unknown_top_level_keys_are_named() {
        let json = minimal_json().replacen("\"seed\": 7", "\"seed\": 7, \"sede\": 1", 1);
        let err = serde_json::from_str::<RunConfig>(&json).unwrap_err();
        assert!(err.to_string().contains("sede"), "got: {err}");
    }

    #[test]
    fn unknown_nested_keys_are_named() {
        let json = minimal_json().replacen("\"eta\": 0.9", "\"eta\": 0.9, \"etaa\": 0.1", 1);
        let err = serde_json::from_str::<RunConfig>(&json).unwrap_err();
        assert!(err.to_string().contains("etaa"), "got: {err}");
    }

    #[test]
    fn policy_variants_parse() {
        let json = minimal_json().replacen(
            "\"policy\": \"fixed_compute\"",
            "\"policy\": {\"q_learning\": {\"qtable_path\": \"table.json\"}}",
            1,
        );
        let config: RunConfig = serde_json::from_str(&json).unwrap();
        match &config.policy {
            PolicySelector::QLearning {
                qtable_path,
                epsilon,
            } => {
                assert_eq!(qtable_path.as_deref(), Some(std::path::Path::new("table.json")));
                assert_eq!(*epsilon, 0.0);
            }
            other => panic!("unexpected policy: {other:?}"),
        }
    }

    #[test]
    fn range_axis_is_inclusive_and_increasing() {
        let range = RangeSpec {
            min: 1.0,
            max: 3.0,
            count: 5,
        };
        range.validate("sweep.e0").unwrap();
        let axis = range.axis();
        assert_eq!(axis, vec![1.0, 1.5, 2.0, 2.5, 3.0]);

        let single = RangeSpec {
            min: 1.0,
            max: 2.0,
            count: 1,
        };
        assert_eq!(single.axis(), vec![1.0]);

        let bad = RangeSpec {
            min: 3.0,
            max: 1.0,
            count: 5,
        };
        let err = bad.validate("sweep.t0").unwrap_err();
        assert!(err.to_string().contains("sweep.t0"), "got: {err}");
    }

    #[test]
    fn invalid_epsilon_is_rejected() {
        let json = minimal_json().replacen(
            "\"policy\": \"fixed_compute\"",
            "\"policy\": {\"q_learning\": {\"qtable_path\": \"t.json\", \"epsilon\": 1.5}}",
            1,
        );
        let config: RunConfig = serde_json::from_str(&json).unwrap();
        let err = config.validate().unwrap_err();
        assert!(err.to_string().contains("epsilon"), "got: {err}");
    }
}
