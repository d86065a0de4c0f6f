//! Executes a validated experiment: one lifetime per seed, each in its own
//! subdirectory, plus a per-run summary file.
//!
//! Layout under the output directory:
//!
//! ```text
//! <out>/config.toml            copy of the experiment as run
//! <out>/summary.csv            one row per seed
//! <out>/seed-<n>/metrics.csv   full step log
//! <out>/seed-<n>/*.svg         optional plots
//! ```
//!
//! Synchronous runs are deterministic functions of (config, seed), so a
//! rerun into the same directory reproduces every file byte for byte.

use std::env;
use std::fs;
use std::io;
use std::path::{Path, PathBuf};

use curio_core::agent::{pure_curiosity_return, run_lifetime, MetricsLog};
use curio_core::reward::EngineKind;
use thiserror::Error;

use crate::config::ValidatedExperiment;
use crate::plots;

/// Environment variable naming the default output root.
pub const OUT_ROOT_VAR: &str = "CURIO_OUT_ROOT";

pub const SUMMARY_VERSION: u32 = 1;
const SUMMARY_MAGIC: &str = "# curio-summary v";

#[derive(Debug, Error)]
pub enum RunnerError {
    #[error("cannot write {}: {source}", .path.display())]
    Io {
        path: PathBuf,
        #[source]
        source: io::Error,
    },
    #[error("run failed: {0}")]
    Agent(#[from] curio_core::agent::AgentError),
}

#[derive(Debug, Clone)]
pub struct SeedArtifacts {
    pub seed: u64,
    pub dir: PathBuf,
    pub metrics_path: PathBuf,
    pub incomplete: bool,
}

#[derive(Debug, Clone)]
pub struct RunArtifacts {
    pub root: PathBuf,
    pub config_path: PathBuf,
    pub summary_path: PathBuf,
    pub seeds: Vec<SeedArtifacts>,
}

/// Where a run's artifacts land, in order of preference: the config's own
/// `output_dir`, then `<root>/<name>` with an explicit root, then
/// `$CURIO_OUT_ROOT/<name>`, then `runs/<name>`.
pub fn resolve_output_dir(exp: &ValidatedExperiment, out_root: Option<&Path>) -> PathBuf {
    if let Some(dir) = &exp.config.run.output_dir {
        return dir.clone();
    }
    let root = match out_root {
        Some(r) => r.to_path_buf(),
        None => env::var_os(OUT_ROOT_VAR).map(PathBuf::from).unwrap_or_else(|| "runs".into()),
    };
    root.join(&exp.config.name)
}

fn write(path: &Path, contents: &str) -> Result<(), RunnerError> {
    fs::write(path, contents).map_err(|source| RunnerError::Io { path: path.to_path_buf(), source })
}

/// Runs every seed and writes all artifacts. `plots` is in addition to the
/// config's own plot switch.
pub fn execute(
    exp: &ValidatedExperiment,
    out_root: Option<&Path>,
    plots: bool,
) -> Result<RunArtifacts, RunnerError> {
    let root = resolve_output_dir(exp, out_root);
    fs::create_dir_all(&root)
        .map_err(|source| RunnerError::Io { path: root.clone(), source })?;

    let config_path = root.join("config.toml");
    let config_text =
        toml::to_string_pretty(&exp.config).expect("a parsed config serializes back");
    write(&config_path, &config_text)?;

    let draw_plots = plots || exp.config.run.plots;
    let mut seeds = Vec::new();
    let mut summary = String::new();
    summary.push_str(&format!("{SUMMARY_MAGIC}{SUMMARY_VERSION}\n"));
    summary.push_str(&summary_header(exp.action_count));

    for &seed in &exp.config.run.seeds {
        let dir = root.join(format!("seed-{seed}"));
        fs::create_dir_all(&dir)
            .map_err(|source| RunnerError::Io { path: dir.clone(), source })?;

        let mut env = exp.build_env(seed);
        let model = exp.build_model();
        let mut controller = exp.build_controller(seed);
        let outcome = run_lifetime(
            &mut *env,
            model,
            &mut controller,
            &exp.config.reward,
            &exp.config.orchestration,
            exp.config.run.steps,
        )?;

        let metrics_path = dir.join("metrics.csv");
        write(&metrics_path, &outcome.log.to_csv())?;
        if draw_plots {
            write(&dir.join("reward_vs_time.svg"), &plots::reward_vs_time_svg(&outcome.log))?;
            write(
                &dir.join("channel_occupancy.svg"),
                &plots::channel_occupancy_svg(&outcome.log, exp.action_count),
            )?;
        }

        summary.push_str(&summary_row(seed, &outcome.log, exp.action_count));
        seeds.push(SeedArtifacts {
            seed,
            dir,
            metrics_path,
            incomplete: outcome.log.incomplete,
        });
    }

    let summary_path = root.join("summary.csv");
    write(&summary_path, &summary)?;
    Ok(RunArtifacts { root, config_path, summary_path, seeds })
}

fn summary_header(action_count: u16) -> String {
    let mut header = String::from(
        "seed,steps,external_total,intrinsic_total,pure_curiosity_return,\
         steps_to_first_goal,rounds_emitted,rounds_consumed,incomplete",
    );
    for a in 0..action_count {
        header.push_str(&format!(",visits_{a}"));
    }
    header.push('\n');
    header
}

fn summary_row(seed: u64, log: &MetricsLog, action_count: u16) -> String {
    let pure = match pure_curiosity_return(log) {
        Ok(v) => v.to_string(),
        Err(_) => String::new(),
    };
    let first_goal = log
        .first_external_reward_at()
        .map(|t| t.to_string())
        .unwrap_or_default();
    let mut visits = vec![0u64; action_count as usize];
    for row in &log.rows {
        if let Some(v) = visits.get_mut(row.action as usize) {
            *v += 1;
        }
    }
    let mut line = format!(
        "{seed},{},{},{},{pure},{first_goal},{},{},{}",
        log.rows.len(),
        log.total_external(),
        log.total_intrinsic(),
        log.queue.emitted,
        log.queue.consumed,
        u8::from(log.incomplete),
    );
    for v in visits {
        line.push_str(&format!(",{v}"));
    }
    line.push('\n');
    line
}

/// True when the experiment's reward engine pays through the round queue,
/// i.e. the rounds columns in the summary are meaningful.
pub fn uses_progress_engine(exp: &ValidatedExperiment) -> bool {
    matches!(exp.config.reward.engine, EngineKind::Progress { .. })
}
