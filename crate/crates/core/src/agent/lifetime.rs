//! One finite agent life, synchronous or asynchronous.
//!
//! The controller loop is the same in both modes: read the state, pick an
//! action, step the environment, collect intrinsic reward, learn, record.
//! What differs is where intrinsic reward comes from. With the progress
//! engine a compressor repeatedly snapshots the history, scores an
//! evaluation slice before and after a bounded burst of training, and queues
//! the measured code-length drop; synchronously that round runs inline every
//! `eval_cadence` steps, asynchronously it free-runs on its own thread and
//! the queue is a real channel. The per-step engines (prediction error,
//! belief surprise) have no queue at all: the model learns inline and each
//! observation is priced as it arrives.

use std::collections::VecDeque;
use std::sync::atomic::{AtomicBool, Ordering};
use std::sync::mpsc;
use std::sync::{Arc, RwLock};
use std::thread;

use rand::SeedableRng;
use rand_chacha::ChaCha12Rng;

use crate::envs::{EnvDescription, Environment};
use crate::history::History;
use crate::model::{performance_l, performance_ltau, SequenceModel};
use crate::reward::{
    bayesian_surprise_directed, combine, compression_progress, prediction_error_reward,
    EngineKind, PerformanceMeasure, ProgressConfig, RewardConfig, RewardError, RewardEvent,
};
use crate::{StateId, Symbol};

use super::metrics::{MetricsLog, MetricsRow, QueueStats};
use super::{
    q_update, select_action, AgentError, ControllerState, EvalWindow, OrchestrationConfig,
    OrchestrationMode,
};

/// Salt separating the environment's step rng from the action rng derived
/// from the same seed.
const ENV_RNG_SALT: u64 = 0x2545_F491_4F6C_DD1D;

/// Longest context handed to per-step engines when predicting the next
/// symbol. Bounds work per step without troubling any model in this crate.
const STEPWISE_CONTEXT_CAP: usize = 256;

/// Intrinsic rewards within this distance of zero count as "flat" for the
/// progress-bucket state augmentation.
const BUCKET_FLAT_TOLERANCE: f64 = 1e-9;

/// Everything a finished (or faulted) lifetime leaves behind.
#[derive(Debug, Clone)]
pub struct LifetimeOutcome<M> {
    pub history: History,
    pub log: MetricsLog,
    /// Final model state: the compressor's model under the progress engine,
    /// the inline model under per-step engines.
    pub model: M,
}

/// Runs one life of `steps` controller steps.
///
/// The run is a deterministic function of the arguments in synchronous mode;
/// in asynchronous mode event timing depends on the scheduler but queue
/// accounting is still exact. An environment fault ends the life early with
/// the partial log flagged incomplete rather than an `Err`; errors are
/// reserved for bad configuration.
pub fn run_lifetime<M, E>(
    env: &mut E,
    model: M,
    controller: &mut ControllerState,
    reward_cfg: &RewardConfig,
    orch: &OrchestrationConfig,
    steps: u64,
) -> Result<LifetimeOutcome<M>, AgentError>
where
    M: SequenceModel + Clone + Send + 'static,
    E: Environment + ?Sized,
{
    if steps == 0 {
        return Err(AgentError::ZeroSteps);
    }
    orch.validate()?;
    reward_cfg.validate()?;
    let desc = env.describe();
    if model.alphabet_size() != desc.alphabet_size {
        return Err(AgentError::AlphabetMismatch {
            model: model.alphabet_size(),
            env: desc.alphabet_size,
        });
    }
    match orch.mode {
        OrchestrationMode::Synchronous => run_sync(env, model, controller, reward_cfg, orch, steps, desc),
        OrchestrationMode::Asynchronous => {
            if reward_cfg.progress_config().is_none() {
                return Err(AgentError::BadOrchestration(
                    "asynchronous mode requires the progress engine; per-step engines have no \
                     event queue to decouple"
                        .into(),
                ));
            }
            run_async(env, model, controller, reward_cfg, orch, steps, desc)
        }
    }
}

fn bucket_of(r_int: f64) -> StateId {
    if r_int > BUCKET_FLAT_TOLERANCE {
        2
    } else if r_int < -BUCKET_FLAT_TOLERANCE {
        0
    } else {
        1
    }
}

fn controller_state_id(raw: StateId, last_r_int: f64, augment: bool) -> StateId {
    if augment {
        raw * 3 + bucket_of(last_r_int)
    } else {
        raw
    }
}

fn measure_bits<M: SequenceModel + Clone>(
    model: &M,
    data: &[Symbol],
    measure: PerformanceMeasure,
) -> f64 {
    match measure {
        PerformanceMeasure::CodeLength => performance_l(model, data),
        PerformanceMeasure::CodeLengthPlusLogWork => performance_ltau(model, data),
    }
}

/// One compressor-improvement round against a history snapshot.
///
/// Scores the evaluation slice, trains on up to `budget` not-yet-seen
/// symbols of the global stream (tracked by `train_cursor`), scores the same
/// slice again, and returns the event. The two scores bracket exactly one
/// training burst, so the event's value is the code-length drop that burst
/// bought on that slice.
fn compressor_round<M: SequenceModel + Clone>(
    model: &mut M,
    history: &History,
    window: EvalWindow,
    budget: u64,
    train_cursor: &mut u64,
    progress: &ProgressConfig,
) -> Result<RewardEvent, RewardError> {
    let slice = match window {
        EvalWindow::FullHistory => history.full(),
        EvalWindow::LastSteps { steps } => history.last(steps),
    };
    let observations = slice.observations();
    let c_old = measure_bits(model, &observations, progress.measure);
    let train_end = history.len().min(*train_cursor + budget);
    if train_end > *train_cursor {
        let fresh = history
            .slice(*train_cursor + 1, train_end)
            .expect("training cursor stays within history")
            .observations();
        for &symbol in &fresh {
            model.update(symbol);
        }
        *train_cursor = train_end;
    }
    let c_new = measure_bits(model, &observations, progress.measure);
    let value = compression_progress(c_old, c_new, progress)?;
    Ok(RewardEvent {
        issued_at: history.len(),
        evaluated_history_end: slice.end(),
        c_old,
        c_new,
        value,
    })
}

fn finite_or_err(value: f64) -> Result<f64, AgentError> {
    if value.is_finite() {
        Ok(value)
    } else {
        Err(AgentError::Reward(RewardError::NonFinite { name: "intrinsic reward", value }))
    }
}

fn run_sync<M, E>(
    env: &mut E,
    model: M,
    controller: &mut ControllerState,
    reward_cfg: &RewardConfig,
    orch: &OrchestrationConfig,
    steps: u64,
    desc: EnvDescription,
) -> Result<LifetimeOutcome<M>, AgentError>
where
    M: SequenceModel + Clone,
    E: Environment + ?Sized,
{
    let mut action_rng = ChaCha12Rng::seed_from_u64(controller.rng_seed);
    let mut env_rng = ChaCha12Rng::seed_from_u64(controller.rng_seed ^ ENV_RNG_SALT);
    let mut history = History::new(desc.alphabet_size)?;
    let mut log = MetricsLog {
        rows: Vec::with_capacity(steps as usize),
        rounds: Vec::new(),
        queue: QueueStats::default(),
        incomplete: false,
        fault: None,
    };

    let progress = reward_cfg.progress_config();
    let mut model = model;
    // Progress-engine state: pending events and how far training has read.
    let mut queue: VecDeque<RewardEvent> = VecDeque::new();
    let mut train_cursor: u64 = 0;
    // Per-step-engine state: recent observations fed back as context.
    let mut context: VecDeque<Symbol> = VecDeque::new();

    let mut cumulative_saved = 0.0;
    let mut last_r_int = 0.0;

    for t in 1..=steps {
        let state =
            controller_state_id(env.state_id(), last_r_int, orch.observe_progress_bucket);
        let action = select_action(controller, state, desc.action_count, &mut action_rng);
        let outcome = match env.step(action, &mut env_rng) {
            Ok(o) => o,
            Err(e) => {
                log.incomplete = true;
                log.fault = Some(format!("environment fault at step {t}: {e}"));
                break;
            }
        };

        let mut consumed: Option<RewardEvent> = None;
        let r_int = match &reward_cfg.engine {
            EngineKind::Progress { .. } => match queue.pop_front() {
                Some(ev) => {
                    log.queue.consumed += 1;
                    cumulative_saved += ev.c_old - ev.c_new;
                    consumed = Some(ev);
                    ev.value
                }
                None => 0.0,
            },
            EngineKind::PredictionError { scale } => {
                let predicted = model.predict(context.make_contiguous());
                let r = scale * prediction_error_reward(&predicted, outcome.observation);
                model.update(outcome.observation);
                finite_or_err(r)?
            }
            EngineKind::BayesianSurprise { scale, direction } => {
                let prior = model.predict(context.make_contiguous());
                model.update(outcome.observation);
                let posterior = model.predict(context.make_contiguous());
                let r = scale * bayesian_surprise_directed(&prior, &posterior, *direction)?;
                finite_or_err(r)?
            }
        };
        if !matches!(reward_cfg.engine, EngineKind::Progress { .. }) {
            context.push_back(outcome.observation);
            if context.len() > STEPWISE_CONTEXT_CAP {
                context.pop_front();
            }
        }

        let combined = combine(outcome.reward_ext, r_int, reward_cfg.lambda);
        let next_state = if outcome.terminal {
            None
        } else {
            Some(controller_state_id(outcome.state, r_int, orch.observe_progress_bucket))
        };
        q_update(controller, state, action, combined, next_state, desc.action_count);

        history.append(outcome.observation, action, outcome.reward_ext, r_int)?;
        log.rows.push(MetricsRow {
            t,
            env_state: state,
            action,
            r_ext: outcome.reward_ext,
            r_int,
            combined,
            event: consumed,
            cumulative_bits_saved: cumulative_saved,
        });
        last_r_int = r_int;
        if outcome.terminal {
            env.reset_episode();
        }

        if let Some(cfg) = progress {
            if t % orch.eval_cadence == 0 {
                let ev = compressor_round(
                    &mut model,
                    &history,
                    orch.eval_window,
                    orch.improver_steps_per_round,
                    &mut train_cursor,
                    &cfg,
                )?;
                log.rounds.push(ev);
                log.queue.emitted += 1;
                queue.push_back(ev);
            }
        }
    }

    log.queue.pending_discarded = queue.len() as u64;
    Ok(LifetimeOutcome { history, log, model })
}

fn run_async<M, E>(
    env: &mut E,
    model: M,
    controller: &mut ControllerState,
    reward_cfg: &RewardConfig,
    orch: &OrchestrationConfig,
    steps: u64,
    desc: EnvDescription,
) -> Result<LifetimeOutcome<M>, AgentError>
where
    M: SequenceModel + Clone + Send + 'static,
    E: Environment + ?Sized,
{
    let progress = reward_cfg.progress_config().expect("checked by run_lifetime");
    let history = Arc::new(RwLock::new(History::new(desc.alphabet_size)?));
    let stop = Arc::new(AtomicBool::new(false));
    let (tx, rx) = mpsc::channel::<RewardEvent>();

    let worker = {
        let history = Arc::clone(&history);
        let stop = Arc::clone(&stop);
        let window = orch.eval_window;
        let budget = orch.improver_steps_per_round;
        thread::spawn(move || {
            let mut model = model;
            let mut train_cursor = 0u64;
            let mut rounds: Vec<RewardEvent> = Vec::new();
            let mut fault = None;
            while !stop.load(Ordering::Relaxed) {
                let snapshot = history.read().expect("history lock poisoned").clone();
                if snapshot.is_empty() {
                    thread::yield_now();
                    continue;
                }
                match compressor_round(
                    &mut model,
                    &snapshot,
                    window,
                    budget,
                    &mut train_cursor,
                    &progress,
                ) {
                    Ok(ev) => {
                        if tx.send(ev).is_err() {
                            break;
                        }
                        rounds.push(ev);
                    }
                    Err(e) => {
                        fault = Some(format!("compressor fault: {e}"));
                        break;
                    }
                }
            }
            (model, rounds, fault)
        })
    };

    let mut action_rng = ChaCha12Rng::seed_from_u64(controller.rng_seed);
    let mut env_rng = ChaCha12Rng::seed_from_u64(controller.rng_seed ^ ENV_RNG_SALT);
    let mut log = MetricsLog {
        rows: Vec::with_capacity(steps as usize),
        rounds: Vec::new(),
        queue: QueueStats::default(),
        incomplete: false,
        fault: None,
    };
    let mut cumulative_saved = 0.0;
    let mut last_r_int = 0.0;

    for t in 1..=steps {
        let raw_state = env.state_id();
        let state = controller_state_id(raw_state, last_r_int, orch.observe_progress_bucket);
        let action = select_action(controller, state, desc.action_count, &mut action_rng);
        let outcome = match env.step(action, &mut env_rng) {
            Ok(o) => o,
            Err(e) => {
                log.incomplete = true;
                log.fault = Some(format!("environment fault at step {t}: {e}"));
                break;
            }
        };

        let mut consumed: Option<RewardEvent> = None;
        let r_int = match rx.try_recv() {
            Ok(ev) => {
                log.queue.consumed += 1;
                cumulative_saved += ev.c_old - ev.c_new;
                consumed = Some(ev);
                ev.value
            }
            Err(_) => 0.0,
        };

        let combined = combine(outcome.reward_ext, r_int, reward_cfg.lambda);
        let next_state = if outcome.terminal {
            None
        } else {
            Some(controller_state_id(outcome.state, r_int, orch.observe_progress_bucket))
        };
        q_update(controller, state, action, combined, next_state, desc.action_count);

        history
            .write()
            .expect("history lock poisoned")
            .append(outcome.observation, action, outcome.reward_ext, r_int)?;
        log.rows.push(MetricsRow {
            t,
            env_state: state,
            action,
            r_ext: outcome.reward_ext,
            r_int,
            combined,
            event: consumed,
            cumulative_bits_saved: cumulative_saved,
        });
        last_r_int = r_int;
        if outcome.terminal {
            env.reset_episode();
        }
    }

    stop.store(true, Ordering::Relaxed);
    let (model, rounds, worker_fault) = worker.join().expect("compressor thread panicked");
    // Anything still in flight at death was emitted but never paid out.
    let mut pending = 0u64;
    while rx.try_recv().is_ok() {
        pending += 1;
    }
    log.queue.emitted = rounds.len() as u64;
    log.queue.pending_discarded = pending;
    log.rounds = rounds;
    if let Some(fault) = worker_fault {
        log.incomplete = true;
        log.fault = Some(match log.fault.take() {
            Some(prev) => format!("{prev}; {fault}"),
            None => fault,
        });
    }

    let history = match Arc::try_unwrap(history) {
        Ok(lock) => lock.into_inner().expect("history lock poisoned"),
        Err(arc) => arc.read().expect("history lock poisoned").clone(),
    };
    Ok(LifetimeOutcome { history, log, model })
}
