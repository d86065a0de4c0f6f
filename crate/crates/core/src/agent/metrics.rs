//! Per-step run log and its CSV form.
//!
//! One row per controller step. Steps at which a progress event was consumed
//! carry the event's code lengths and evaluation endpoint; other steps leave
//! those fields empty. The CSV begins with a version line so downstream
//! tooling can refuse files it does not understand, and all floats are
//! written in shortest round-trip form, which also makes reruns of a
//! deterministic run byte-identical.

use serde::{Deserialize, Serialize};

use crate::reward::RewardEvent;
use crate::{Action, StateId, Timestep};

pub const METRICS_FORMAT_VERSION: u32 = 1;

const COLUMNS: &str =
    "t,env_state,action,r_ext,r_int,combined,c_old,c_new,eval_window_end,cumulative_bits_saved";

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MetricsRow {
    pub t: Timestep,
    /// State in which the action was selected.
    pub env_state: StateId,
    pub action: Action,
    pub r_ext: f64,
    pub r_int: f64,
    pub combined: f64,
    /// The progress event consumed at this step, if any.
    pub event: Option<RewardEvent>,
    /// Running sum of raw c_old - c_new over consumed events.
    pub cumulative_bits_saved: f64,
}

/// Queue accounting at end of life: emitted = consumed + pending_discarded.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct QueueStats {
    pub emitted: u64,
    pub consumed: u64,
    /// Events still queued at death; discarded, never paid out.
    pub pending_discarded: u64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MetricsLog {
    pub rows: Vec<MetricsRow>,
    /// Every compressor round that ran, in issue order, whether or not its
    /// event was consumed before death.
    pub rounds: Vec<RewardEvent>,
    pub queue: QueueStats,
    /// True when the lifetime aborted early on an environment fault.
    pub incomplete: bool,
    /// Human-readable fault description when incomplete.
    pub fault: Option<String>,
}

impl MetricsLog {
    pub fn to_csv(&self) -> String {
        let mut out = String::new();
        out.push_str(&format!("# curio-metrics v{METRICS_FORMAT_VERSION}\n"));
        out.push_str(COLUMNS);
        out.push('\n');
        for row in &self.rows {
            let (c_old, c_new, window_end) = match row.event {
                Some(ev) => {
                    (ev.c_old.to_string(), ev.c_new.to_string(), ev.evaluated_history_end.to_string())
                }
                None => (String::new(), String::new(), String::new()),
            };
            out.push_str(&format!(
                "{},{},{},{},{},{},{},{},{},{}\n",
                row.t,
                row.env_state,
                row.action,
                row.r_ext,
                row.r_int,
                row.combined,
                c_old,
                c_new,
                window_end,
                row.cumulative_bits_saved,
            ));
        }
        out
    }

    pub fn total_intrinsic(&self) -> f64 {
        self.rows.iter().map(|r| r.r_int).sum()
    }

    pub fn total_external(&self) -> f64 {
        self.rows.iter().map(|r| r.r_ext).sum()
    }

    /// Step at which external reward first arrived, if it ever did.
    pub fn first_external_reward_at(&self) -> Option<Timestep> {
        self.rows.iter().find(|r| r.r_ext > 0.0).map(|r| r.t)
    }
}
