//! Building blocks for compression-driven curiosity experiments.
//!
//! The crate is organized around one loop: an agent acts in an environment,
//! every observation lands in an append-only [`history`], an adaptive sequence
//! model ([`model`]) keeps trying to compress that history, and the measured
//! change in code length is fed back to the agent as intrinsic reward
//! ([`reward`], [`agent`]). The [`envs`] module supplies small discrete
//! environments whose information content is easy to reason about, and
//! [`art`] turns the "short program, rich output" idea into inspectable
//! line-and-circle sketches.

pub mod agent;
pub mod art;
pub mod envs;
pub mod history;
pub mod model;
pub mod reward;

/// Discrete observation symbol. Alphabets are small (tens of symbols), so
/// sixteen bits is plenty.
pub type Symbol = u16;

/// Action identifier, an index into the environment's action set.
pub type Action = u16;

/// 1-based step counter over a lifetime. Step 1 is the first recorded step.
pub type Timestep = u64;

/// Environment state identifier as exposed to the tabular controller.
pub type StateId = u32;
