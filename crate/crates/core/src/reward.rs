//! Intrinsic reward engines.
//!
//! The engine this crate is built around pays the agent for *compression
//! progress*: score the data with the compressor before and after a round of
//! model improvement, and reward the drop in code length,
//!
//! ```text
//! r_int = eta * (c_old - c_new)
//! ```
//!
//! with both code lengths measured on the same data. Negative progress (the
//! "improvement" made things worse) passes through by default so the agent
//! can learn to avoid whatever caused it; an optional clamp floors it at 0.
//!
//! Two historically important alternatives are provided for comparison
//! runs. [`prediction_error_reward`] pays the raw surprisal of each
//! observation, which famously drives an agent to noise sources: noise stays
//! surprising forever. [`bayesian_surprise`] pays the KL divergence between
//! the model's predictive distribution after and before an observation,
//! which rewards belief movement rather than error.
//!
//! [`beauty`] and [`interestingness`] express the aesthetic reading of the
//! same quantity: beauty as negative code length per symbol under the
//! current model, interestingness as its first derivative over time.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::model::{code_length, SequenceModel};
use crate::{Symbol, Timestep};

#[derive(Debug, Error, PartialEq)]
pub enum RewardError {
    #[error("{name} must be finite, got {value}")]
    NonFinite { name: &'static str, value: f64 },
    #[error("distribution lengths differ: prior {prior}, posterior {posterior}")]
    DimensionMismatch { prior: usize, posterior: usize },
}

/// Which code-length measure a progress round compares.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum PerformanceMeasure {
    /// Plain two-part code length.
    #[default]
    CodeLength,
    /// Code length plus the log of counted scoring work.
    CodeLengthPlusLogWork,
}

/// Parameters of the compression-progress functional.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ProgressConfig {
    /// Scale applied to the raw bit difference.
    pub eta: f64,
    /// Floor rewards at zero instead of passing negative progress through.
    pub clip_negative: bool,
    pub measure: PerformanceMeasure,
}

impl Default for ProgressConfig {
    fn default() -> Self {
        ProgressConfig {
            eta: 1.0,
            clip_negative: false,
            measure: PerformanceMeasure::CodeLength,
        }
    }
}

/// One compressor-improvement round's outcome, as queued for the controller.
///
/// `evaluated_history_end` is the last timestep of the slice both model
/// states were scored on; `issued_at` is the history length when the event
/// was emitted. In asynchronous runs an event may be consumed at a later
/// step than either; both stamps are preserved in the run log.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RewardEvent {
    pub issued_at: Timestep,
    pub evaluated_history_end: Timestep,
    pub c_old: f64,
    pub c_new: f64,
    pub value: f64,
}

/// Reward for a drop in code length on fixed data: `eta * (c_old - c_new)`,
/// optionally floored at zero.
pub fn compression_progress(
    c_old: f64,
    c_new: f64,
    config: &ProgressConfig,
) -> Result<f64, RewardError> {
    for (name, value) in [("c_old", c_old), ("c_new", c_new), ("eta", config.eta)] {
        if !value.is_finite() {
            return Err(RewardError::NonFinite { name, value });
        }
    }
    let raw = config.eta * (c_old - c_new);
    Ok(if config.clip_negative { raw.max(0.0) } else { raw })
}

/// Surprisal of the observed symbol under the prediction made for it.
pub fn prediction_error_reward(predicted: &[f64], actual: Symbol) -> f64 {
    -predicted[actual as usize].log2()
}

/// Direction of the belief-update divergence.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum KlDirection {
    /// KL(posterior || prior): bits of evidence moving beliefs forward.
    #[default]
    PosteriorFromPrior,
    /// KL(prior || posterior), for comparison runs.
    PriorFromPosterior,
}

/// Belief-update surprise KL(posterior || prior), in bits.
pub fn bayesian_surprise(prior: &[f64], posterior: &[f64]) -> Result<f64, RewardError> {
    bayesian_surprise_directed(prior, posterior, KlDirection::PosteriorFromPrior)
}

pub fn bayesian_surprise_directed(
    prior: &[f64],
    posterior: &[f64],
    direction: KlDirection,
) -> Result<f64, RewardError> {
    if prior.len() != posterior.len() {
        return Err(RewardError::DimensionMismatch {
            prior: prior.len(),
            posterior: posterior.len(),
        });
    }
    let (p, q) = match direction {
        KlDirection::PosteriorFromPrior => (posterior, prior),
        KlDirection::PriorFromPosterior => (prior, posterior),
    };
    let mut kl = 0.0;
    for (&pi, &qi) in p.iter().zip(q) {
        if pi > 0.0 {
            kl += pi * (pi / qi).log2();
        }
    }
    Ok(kl)
}

/// Total reward the controller learns from: external plus weighted intrinsic.
pub fn combine(r_ext: f64, r_int: f64, lambda: f64) -> f64 {
    r_ext + lambda * r_int
}

/// Which intrinsic signal a run pays, with its parameters.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "engine", rename_all = "snake_case")]
pub enum EngineKind {
    /// Code-length drop per compressor-improvement round, via the event queue.
    Progress {
        #[serde(default = "default_unit")]
        eta: f64,
        #[serde(default)]
        clip_negative: bool,
        #[serde(default)]
        measure: PerformanceMeasure,
    },
    /// Per-step surprisal of each observation. Historically earlier, and
    /// pathological: noise stays maximally rewarding forever.
    PredictionError {
        #[serde(default = "default_unit")]
        scale: f64,
    },
    /// Per-step KL divergence between the model's predictive beliefs after
    /// and before the observation.
    BayesianSurprise {
        #[serde(default = "default_unit")]
        scale: f64,
        #[serde(default)]
        direction: KlDirection,
    },
}

fn default_unit() -> f64 {
    1.0
}

/// Reward-side run configuration: the engine plus the mixing weight.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RewardConfig {
    /// Weight of the intrinsic term in the combined reward.
    #[serde(default = "default_unit")]
    pub lambda: f64,
    #[serde(flatten)]
    pub engine: EngineKind,
}

impl Default for RewardConfig {
    fn default() -> Self {
        RewardConfig {
            lambda: 1.0,
            engine: EngineKind::Progress {
                eta: 1.0,
                clip_negative: false,
                measure: PerformanceMeasure::CodeLength,
            },
        }
    }
}

impl RewardConfig {
    pub fn validate(&self) -> Result<(), RewardError> {
        if !self.lambda.is_finite() {
            return Err(RewardError::NonFinite { name: "lambda", value: self.lambda });
        }
        let (name, value) = match self.engine {
            EngineKind::Progress { eta, .. } => ("eta", eta),
            EngineKind::PredictionError { scale } => ("scale", scale),
            EngineKind::BayesianSurprise { scale, .. } => ("scale", scale),
        };
        if !value.is_finite() {
            return Err(RewardError::NonFinite { name, value });
        }
        Ok(())
    }

    pub fn progress_config(&self) -> Option<ProgressConfig> {
        match self.engine {
            EngineKind::Progress { eta, clip_negative, measure } => {
                Some(ProgressConfig { eta, clip_negative, measure })
            }
            _ => None,
        }
    }
}

/// Subjective beauty of `data` under the observer's current model: negative
/// code length per symbol, so 0 is the most beautiful value reachable and
/// fully learned data approaches it. Empty data is defined as 0.
pub fn beauty<M: SequenceModel + Clone>(model: &M, data: &[Symbol]) -> f64 {
    if data.is_empty() {
        return 0.0;
    }
    -code_length(model, data).data_bits / data.len() as f64
}

/// First differences of a beauty series: how fast the data is becoming more
/// compressible. Returns length `series.len() - 1`, empty for short input.
pub fn interestingness(series: &[f64]) -> Vec<f64> {
    if series.len() < 2 {
        return Vec::new();
    }
    series.windows(2).map(|w| w[1] - w[0]).collect()
}
