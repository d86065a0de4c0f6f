//! Small discrete environments with controllable information content.
//!
//! Two worlds are provided. [`ChannelBanditEnv`] is a one-state bandit whose
//! arms are symbol streams of very different character: constant (nothing to
//! learn after one glance), periodic (algorithmically learnable), biased
//! coin (statistically compressible), uniform noise (incompressible), and
//! friends. It isolates the question "where does an observer's attention
//! go?" from any navigation problem. [`RoomsWorldEnv`] is a grid world that
//! adds space, sparse external reward, and the question whether curiosity
//! helps find it.
//!
//! Observations are bare symbols; where the agent *is* lives in the state
//! identifier, not in the observation stream the compressor sees.

mod bandit;
mod rooms;

pub use bandit::{ChannelBanditEnv, ChannelSpec};
pub use rooms::{RoomsParams, RoomsWorldEnv};

use rand_chacha::ChaCha12Rng;
use thiserror::Error;

use crate::{Action, StateId, Symbol};

#[derive(Debug, Error)]
pub enum EnvError {
    #[error("action {action} invalid, environment has {action_count} actions")]
    InvalidAction { action: Action, action_count: u16 },
    #[error("channel {index}: {reason}")]
    BadChannel { index: usize, reason: String },
    #[error("map line {line}: {reason}")]
    BadMap { line: usize, reason: String },
}

/// Static facts about an environment, used for wiring and config validation.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct EnvDescription {
    pub state_count: u32,
    pub action_count: u16,
    pub alphabet_size: usize,
}

/// What one environment step produced.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StepOutcome {
    pub observation: Symbol,
    pub reward_ext: f64,
    /// State identifier after the step.
    pub state: StateId,
    pub terminal: bool,
}

/// A discrete environment stepped by the controller process only.
pub trait Environment {
    fn describe(&self) -> EnvDescription;

    /// Identifier of the current state, in `0..describe().state_count`.
    fn state_id(&self) -> StateId;

    fn step(&mut self, action: Action, rng: &mut ChaCha12Rng) -> Result<StepOutcome, EnvError>;

    /// Begin a new episode after a terminal step. Streams and generators
    /// keep their positions; only the agent placement resets.
    fn reset_episode(&mut self);
}
