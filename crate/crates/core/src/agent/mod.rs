//! Tabular controller and the controller/compressor orchestration.
//!
//! The controller is a plain ε-greedy Q-learner over environment state
//! identifiers; everything interesting about it is what reward it is fed.
//! [`run_lifetime`] wires controller, environment, sequence model, and a
//! reward engine into one finite life of `T` steps.
//!
//! With the progress engine, the compressor is a second logical process.
//! It repeatedly snapshots the history, scores its model on an evaluation
//! slice, trains for a bounded number of updates, scores again on the same
//! slice, and emits the code-length drop as a [`RewardEvent`] into an
//! ordered queue. The controller polls that queue once per step and treats
//! an empty poll as zero intrinsic reward. In synchronous mode the round
//! runs inline every `eval_cadence` steps and the whole lifetime is a
//! deterministic function of (config, seed); in asynchronous mode the
//! compressor free-runs on its own thread and reward arrives with genuine,
//! auditable delay.

mod lifetime;
mod metrics;

pub use lifetime::{run_lifetime, LifetimeOutcome};
pub use metrics::{MetricsLog, MetricsRow, QueueStats, METRICS_FORMAT_VERSION};

use std::collections::BTreeMap;

use rand::Rng;
use rand_chacha::ChaCha12Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::envs::EnvError;
use crate::history::HistoryError;
use crate::reward::RewardError;
use crate::{Action, StateId, Timestep};

#[derive(Debug, Error)]
pub enum AgentError {
    #[error("lifetime must be at least 1 step")]
    ZeroSteps,
    #[error("controller parameter {name} = {value} outside {range}")]
    BadControllerParam { name: &'static str, value: f64, range: &'static str },
    #[error("orchestration: {0}")]
    BadOrchestration(String),
    #[error("model alphabet {model} does not match environment alphabet {env}")]
    AlphabetMismatch { model: usize, env: usize },
    #[error("external reward {value} at step {t} in a pure-curiosity log")]
    PureCuriosityViolated { t: Timestep, value: f64 },
    #[error(transparent)]
    Reward(#[from] RewardError),
    #[error(transparent)]
    Env(#[from] EnvError),
    #[error(transparent)]
    History(#[from] HistoryError),
}

/// ε-greedy tabular Q-learner. Unseen (state, action) pairs read as 0.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ControllerState {
    q: BTreeMap<(StateId, Action), f64>,
    pub epsilon: f64,
    pub alpha: f64,
    pub gamma: f64,
    pub rng_seed: u64,
}

impl ControllerState {
    pub fn new(epsilon: f64, alpha: f64, gamma: f64, rng_seed: u64) -> Result<Self, AgentError> {
        if !(0.0..=1.0).contains(&epsilon) {
            return Err(AgentError::BadControllerParam {
                name: "epsilon",
                value: epsilon,
                range: "[0, 1]",
            });
        }
        if !(alpha >= 0.0 && alpha <= 1.0) {
            return Err(AgentError::BadControllerParam {
                name: "alpha",
                value: alpha,
                range: "[0, 1]",
            });
        }
        if !(0.0..=1.0).contains(&gamma) {
            return Err(AgentError::BadControllerParam {
                name: "gamma",
                value: gamma,
                range: "[0, 1]",
            });
        }
        Ok(ControllerState { q: BTreeMap::new(), epsilon, alpha, gamma, rng_seed })
    }

    pub fn q(&self, state: StateId, action: Action) -> f64 {
        self.q.get(&(state, action)).copied().unwrap_or(0.0)
    }

    /// Seed a value directly, e.g. to pin a policy in experiments.
    pub fn set_q(&mut self, state: StateId, action: Action, value: f64) {
        self.q.insert((state, action), value);
    }

    pub fn max_q(&self, state: StateId, action_count: u16) -> f64 {
        (0..action_count).map(|a| self.q(state, a)).fold(f64::NEG_INFINITY, f64::max)
    }
}

/// ε-greedy action choice. Greedy ties break toward the lowest action id, so
/// the policy is a deterministic function of the table when ε = 0.
pub fn select_action(
    controller: &ControllerState,
    state: StateId,
    action_count: u16,
    rng: &mut ChaCha12Rng,
) -> Action {
    debug_assert!(action_count > 0, "action set must be non-empty");
    if rng.gen::<f64>() < controller.epsilon {
        return rng.gen_range(0..action_count);
    }
    let mut best = 0;
    let mut best_q = controller.q(state, 0);
    for a in 1..action_count {
        let q = controller.q(state, a);
        if q > best_q {
            best = a;
            best_q = q;
        }
    }
    best
}

/// One-step temporal-difference update. `next_state = None` marks a terminal
/// transition, whose continuation value is 0.
pub fn q_update(
    controller: &mut ControllerState,
    state: StateId,
    action: Action,
    reward: f64,
    next_state: Option<StateId>,
    action_count: u16,
) {
    let continuation = match next_state {
        Some(s) => controller.max_q(s, action_count),
        None => 0.0,
    };
    let old = controller.q(state, action);
    let target = reward + controller.gamma * continuation;
    let new = old + controller.alpha * (target - old);
    controller.q.insert((state, action), new);
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum OrchestrationMode {
    #[default]
    Synchronous,
    Asynchronous,
}

/// Which slice of history a compressor round scores.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum EvalWindow {
    /// Everything recorded so far. Exact but O(t) per round.
    FullHistory,
    /// The most recent `steps` observations.
    LastSteps { steps: u64 },
}

impl Default for EvalWindow {
    fn default() -> Self {
        EvalWindow::LastSteps { steps: 512 }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct OrchestrationConfig {
    #[serde(default)]
    pub mode: OrchestrationMode,
    /// Synchronous mode: one compressor round every this many steps.
    #[serde(default = "default_cadence")]
    pub eval_cadence: u64,
    #[serde(default)]
    pub eval_window: EvalWindow,
    /// Model updates the improver may spend per round.
    #[serde(default = "default_improver_steps")]
    pub improver_steps_per_round: u64,
    /// Augment the controller's state id with a coarse bucket (down, flat,
    /// up) of the last intrinsic reward, letting the policy observe the
    /// compressor's mood. Off by default.
    #[serde(default)]
    pub observe_progress_bucket: bool,
}

fn default_cadence() -> u64 {
    32
}

fn default_improver_steps() -> u64 {
    32
}

impl Default for OrchestrationConfig {
    fn default() -> Self {
        OrchestrationConfig {
            mode: OrchestrationMode::Synchronous,
            eval_cadence: default_cadence(),
            eval_window: EvalWindow::default(),
            improver_steps_per_round: default_improver_steps(),
            observe_progress_bucket: false,
        }
    }
}

impl OrchestrationConfig {
    pub fn validate(&self) -> Result<(), AgentError> {
        if self.eval_cadence == 0 {
            return Err(AgentError::BadOrchestration("eval_cadence must be at least 1".into()));
        }
        if let EvalWindow::LastSteps { steps } = self.eval_window {
            if steps == 0 {
                return Err(AgentError::BadOrchestration(
                    "eval window must cover at least 1 step".into(),
                ));
            }
        }
        Ok(())
    }
}

/// Total intrinsic reward of a lifetime that paid no external reward.
pub fn pure_curiosity_return(log: &MetricsLog) -> Result<f64, AgentError> {
    for row in &log.rows {
        if row.r_ext != 0.0 {
            return Err(AgentError::PureCuriosityViolated { t: row.t, value: row.r_ext });
        }
    }
    Ok(log.rows.iter().map(|r| r.r_int).sum())
}
