//! Experiment configuration: TOML schema, validation, and construction of
//! the pieces a run needs.
//!
//! Validation is all-or-nothing: every violation found is reported in one
//! error, and nothing touches the filesystem until a config is fully valid.

use std::fs;
use std::path::{Path, PathBuf};

use curio_core::agent::{ControllerState, OrchestrationConfig, OrchestrationMode};
use curio_core::envs::{ChannelBanditEnv, ChannelSpec, Environment, RoomsParams, RoomsWorldEnv};
use curio_core::model::{Model, ModelConfig};
use curio_core::reward::{EngineKind, RewardConfig};
use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum ConfigError {
    #[error("cannot read {}: {source}", .path.display())]
    Unreadable {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("cannot parse {}: {message}", .path.display())]
    Parse { path: PathBuf, message: String },
    #[error("{}", format_violations(.violations))]
    Invalid { violations: Vec<String> },
}

fn format_violations(violations: &[String]) -> String {
    let plural = if violations.len() == 1 { "" } else { "s" };
    let mut out = format!("invalid config ({} violation{plural}):", violations.len());
    for v in violations {
        out.push_str("\n  - ");
        out.push_str(v);
    }
    out
}

/// Controller hyperparameters as written in configs.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ControllerConfig {
    #[serde(default = "default_epsilon")]
    pub epsilon: f64,
    #[serde(default = "default_alpha")]
    pub alpha: f64,
    #[serde(default = "default_gamma")]
    pub gamma: f64,
}

fn default_epsilon() -> f64 {
    0.1
}

fn default_alpha() -> f64 {
    0.3
}

fn default_gamma() -> f64 {
    0.95
}

impl Default for ControllerConfig {
    fn default() -> Self {
        ControllerConfig {
            epsilon: default_epsilon(),
            alpha: default_alpha(),
            gamma: default_gamma(),
        }
    }
}

/// Environment selection. Each seed of a run gets its own instance, seeded
/// with that seed, so seeds are fully independent replicas.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum EnvSpec {
    /// The stock four channels: constant, periodic-8, biased coin, noise.
    StandardBandit,
    ChannelBandit {
        alphabet_size: usize,
        channels: Vec<ChannelSpec>,
    },
    RoomsWorld {
        /// Inline ASCII map; exclusive with `map_path`.
        map: Option<String>,
        /// Path to an ASCII map file; exclusive with `map`.
        map_path: Option<PathBuf>,
        #[serde(default = "default_rooms_alphabet")]
        alphabet_size: usize,
        #[serde(default = "default_base_pattern")]
        base_pattern: Vec<u16>,
        #[serde(default = "default_goal_reward")]
        goal_reward: f64,
        #[serde(default = "default_horizon")]
        episode_horizon: u64,
    },
}

fn default_rooms_alphabet() -> usize {
    4
}

fn default_base_pattern() -> Vec<u16> {
    RoomsParams::default().base_pattern
}

fn default_goal_reward() -> f64 {
    1.0
}

fn default_horizon() -> u64 {
    200
}

/// The run section: how long, which seeds, where artifacts go.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunSection {
    pub steps: u64,
    pub seeds: Vec<u64>,
    /// Explicit output directory. When absent the run goes to
    /// `$CURIO_OUT_ROOT/<name>` (or `runs/<name>` without the variable).
    #[serde(default)]
    pub output_dir: Option<PathBuf>,
    /// Also render static reward-vs-time and channel-occupancy plots.
    #[serde(default)]
    pub plots: bool,
}

/// One experiment as written on disk.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExperimentConfig {
    /// Name of the experiment; becomes the default output directory name.
    pub name: String,
    pub env: EnvSpec,
    pub model: ModelConfig,
    #[serde(default)]
    pub reward: RewardConfig,
    #[serde(default)]
    pub orchestration: OrchestrationConfig,
    #[serde(default)]
    pub controller: ControllerConfig,
    pub run: RunSection,
}

/// A config that has passed full validation, with any referenced files
/// already read so the run phase cannot hit a late surprise.
#[derive(Debug, Clone)]
pub struct ValidatedExperiment {
    pub config: ExperimentConfig,
    /// Rooms map text, resolved from inline or file form.
    map_text: Option<String>,
    pub alphabet_size: usize,
    pub action_count: u16,
    pub state_count: u32,
}

impl ExperimentConfig {
    pub fn from_toml(text: &str) -> Result<ExperimentConfig, toml::de::Error> {
        toml::from_str(text)
    }

    pub fn load(path: &Path) -> Result<ExperimentConfig, ConfigError> {
        let text = fs::read_to_string(path)
            .map_err(|source| ConfigError::Unreadable { path: path.to_path_buf(), source })?;
        Self::from_toml(&text)
            .map_err(|e| ConfigError::Parse { path: path.to_path_buf(), message: e.to_string() })
    }

    /// Checks everything checkable without touching the output directory and
    /// returns a run-ready plan. All violations are collected, not just the
    /// first.
    pub fn validate(&self) -> Result<ValidatedExperiment, ConfigError> {
        let mut violations = Vec::new();

        if self.name.is_empty() {
            violations.push("name must not be empty".to_string());
        } else if !self
            .name
            .chars()
            .all(|c| c.is_ascii_alphanumeric() || matches!(c, '-' | '_' | '.'))
        {
            violations.push(format!(
                "name '{}' may only use ascii letters, digits, '-', '_', '.'",
                self.name
            ));
        }

        if self.run.steps == 0 {
            violations.push("run.steps must be at least 1".to_string());
        }
        if self.run.seeds.is_empty() {
            violations.push("run.seeds must list at least one seed".to_string());
        }
        let mut sorted_seeds = self.run.seeds.clone();
        sorted_seeds.sort_unstable();
        sorted_seeds.dedup();
        if sorted_seeds.len() != self.run.seeds.len() {
            violations.push("run.seeds must not repeat a seed (outputs would collide)".to_string());
        }

        if let Err(e) = ControllerState::new(
            self.controller.epsilon,
            self.controller.alpha,
            self.controller.gamma,
            0,
        ) {
            violations.push(format!("controller: {e}"));
        }
        if let Err(e) = self.reward.validate() {
            violations.push(format!("reward: {e}"));
        }
        if let Err(e) = self.orchestration.validate() {
            violations.push(format!("orchestration: {e}"));
        }
        if self.orchestration.mode == OrchestrationMode::Asynchronous
            && !matches!(self.reward.engine, EngineKind::Progress { .. })
        {
            violations.push(
                "orchestration: asynchronous mode requires the progress engine; \
                 per-step engines are inherently synchronous"
                    .to_string(),
            );
        }

        let map_text = match self.resolve_map() {
            Ok(text) => text,
            Err(v) => {
                violations.push(v);
                None
            }
        };

        let mut description = None;
        match self.build_env_with_map(0, map_text.as_deref()) {
            Ok(env) => description = Some(env.describe()),
            Err(v) => violations.push(v),
        }

        if let Some(desc) = description {
            if let Err(e) = self.model.build(desc.alphabet_size) {
                violations.push(format!("model: {e}"));
            }
            if self.orchestration.observe_progress_bucket
                && desc.state_count > u32::MAX / 3
            {
                violations.push(format!(
                    "orchestration: observe_progress_bucket triples the state space, \
                     but {} states do not fit",
                    desc.state_count
                ));
            }
        }

        match description {
            Some(desc) if violations.is_empty() => Ok(ValidatedExperiment {
                config: self.clone(),
                map_text,
                alphabet_size: desc.alphabet_size,
                action_count: desc.action_count,
                state_count: desc.state_count,
            }),
            _ => Err(ConfigError::Invalid { violations }),
        }
    }

    fn resolve_map(&self) -> Result<Option<String>, String> {
        match &self.env {
            EnvSpec::RoomsWorld { map, map_path, .. } => match (map, map_path) {
                (Some(_), Some(_)) => {
                    Err("env: give either an inline map or map_path, not both".to_string())
                }
                (None, None) => Err("env: rooms_world needs a map or a map_path".to_string()),
                (Some(text), None) => Ok(Some(text.clone())),
                (None, Some(path)) => fs::read_to_string(path)
                    .map(Some)
                    .map_err(|e| format!("env: cannot read map {}: {e}", path.display())),
            },
            _ => Ok(None),
        }
    }

    fn build_env_with_map(
        &self,
        seed: u64,
        map_text: Option<&str>,
    ) -> Result<Box<dyn Environment>, String> {
        match &self.env {
            EnvSpec::StandardBandit => Ok(Box::new(ChannelBanditEnv::standard_four(seed))),
            EnvSpec::ChannelBandit { alphabet_size, channels } => {
                ChannelBanditEnv::new(channels.clone(), *alphabet_size, seed)
                    .map(|e| Box::new(e) as Box<dyn Environment>)
                    .map_err(|e| format!("env: {e}"))
            }
            EnvSpec::RoomsWorld {
                alphabet_size,
                base_pattern,
                goal_reward,
                episode_horizon,
                ..
            } => {
                let text = map_text.ok_or_else(|| "env: no map resolved".to_string())?;
                let params = RoomsParams {
                    alphabet_size: *alphabet_size,
                    base_pattern: base_pattern.clone(),
                    goal_reward: *goal_reward,
                    episode_horizon: *episode_horizon,
                    seed,
                };
                RoomsWorldEnv::from_map(text, params)
                    .map(|e| Box::new(e) as Box<dyn Environment>)
                    .map_err(|e| format!("env: {e}"))
            }
        }
    }
}

impl ValidatedExperiment {
    pub fn build_env(&self, seed: u64) -> Box<dyn Environment> {
        self.config
            .build_env_with_map(seed, self.map_text.as_deref())
            .expect("validated config builds")
    }

    pub fn build_model(&self) -> Model {
        self.config.model.build(self.alphabet_size).expect("validated config builds")
    }

    pub fn build_controller(&self, seed: u64) -> ControllerState {
        let c = &self.config.controller;
        ControllerState::new(c.epsilon, c.alpha, c.gamma, seed).expect("validated config builds")
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const MINIMAL: &str = r#"
        name = "demo"

        [env]
        kind = "standard_bandit"

        [model]
        kind = "markov"
        order = 2

        [reward]
        lambda = 1.0
        engine = "progress"

        [run]
        steps = 100
        seeds = [1, 2]
    "#;

    #[test]
    fn minimal_config_parses_and_validates() {
        let config = ExperimentConfig::from_toml(MINIMAL).unwrap();
        assert_eq!(config.orchestration.eval_cadence, 32);
        assert_eq!(config.controller.epsilon, 0.1);
        let validated = config.validate().unwrap();
        assert_eq!(validated.alphabet_size, 2);
        assert_eq!(validated.action_count, 4);
    }

    #[test]
    fn all_violations_are_listed_at_once() {
        let mut config = ExperimentConfig::from_toml(MINIMAL).unwrap();
        config.name = "bad name".to_string();
        config.run.steps = 0;
        config.run.seeds = vec![3, 3];
        config.controller.epsilon = 2.0;
        let err = config.validate().unwrap_err();
        let ConfigError::Invalid { violations } = err else {
            panic!("expected a validation report");
        };
        assert_eq!(violations.len(), 4, "{violations:?}");
    }

    #[test]
    fn rooms_world_needs_exactly_one_map_source() {
        let text = r#"
            name = "rooms"

            [env]
            kind = "rooms_world"

            [model]
            kind = "markov"
            order = 1

            [run]
            steps = 10
            seeds = [1]
        "#;
        let config = ExperimentConfig::from_toml(text).unwrap();
        let err = config.validate().unwrap_err();
        assert!(err.to_string().contains("needs a map"));
    }

    #[test]
    fn inline_rooms_map_round_trips_through_validation() {
        let text = r#"
            name = "rooms"

            [env]
            kind = "rooms_world"
            map = "S D\nD G\n"

            [model]
            kind = "markov"
            order = 1

            [run]
            steps = 10
            seeds = [1]
        "#;
        use rand::SeedableRng;

        let validated = ExperimentConfig::from_toml(text).unwrap().validate().unwrap();
        assert_eq!(validated.state_count, 4);
        assert_eq!(validated.alphabet_size, 4);
        let mut env = validated.build_env(1);
        assert_eq!(env.describe().action_count, 4);
        let mut rng = rand_chacha::ChaCha12Rng::seed_from_u64(0);
        env.step(3, &mut rng).unwrap();
    }

    #[test]
    fn async_per_step_engine_is_rejected_up_front() {
        let text = r#"
            name = "bad"

            [env]
            kind = "standard_bandit"

            [model]
            kind = "markov"
            order = 1

            [reward]
            lambda = 1.0
            engine = "prediction_error"

            [orchestration]
            mode = "asynchronous"

            [run]
            steps = 10
            seeds = [1]
        "#;
        let err = ExperimentConfig::from_toml(text).unwrap().validate().unwrap_err();
        assert!(err.to_string().contains("asynchronous"));
    }
}
