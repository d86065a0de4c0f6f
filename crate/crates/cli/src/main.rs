use std::fs;
use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::Context;
use clap::{Parser, Subcommand, ValueEnum};
use curio_cli::art::{build_drawing, masked, sidecar, Procedure};
use curio_cli::config::ExperimentConfig;
use curio_cli::{report, runner};
use curio_core::art::to_svg;

#[derive(Parser)]
#[command(
    name = "curio",
    version,
    about = "Curiosity-driven agent experiments: run lifetimes, aggregate metrics, draw low-complexity art"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run an experiment config: one metrics CSV per seed plus a summary.
    Run {
        /// Experiment description in TOML.
        config: PathBuf,
        /// Output root; overrides $CURIO_OUT_ROOT but not the config's own
        /// output_dir.
        #[arg(long)]
        out_root: Option<PathBuf>,
        /// Also render static SVG plots per seed.
        #[arg(long)]
        plots: bool,
    },
    /// Aggregate summary files into a quartile table (lower-median).
    Report {
        /// One or more summary.csv files from `run`.
        #[arg(required = true)]
        summaries: Vec<PathBuf>,
    },
    /// Generate a construction drawing as SVG plus a sidecar bit report.
    Art {
        #[arg(long, value_enum)]
        procedure: ArtProcedure,
        /// Bisection rounds (face grid) or spawn generations (circles).
        #[arg(long, default_value_t = 0)]
        depth: u32,
        /// Keep mask over the scaffold's primitives: '0'/'1' per primitive.
        #[arg(long)]
        mask: Option<PathBuf>,
        /// Output SVG path; the bit report lands next to it as
        /// <stem>.report.json.
        #[arg(long)]
        out: PathBuf,
    },
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum ArtProcedure {
    FaceGrid,
    FractalCircles,
}

impl From<ArtProcedure> for Procedure {
    fn from(p: ArtProcedure) -> Procedure {
        match p {
            ArtProcedure::FaceGrid => Procedure::FaceGrid,
            ArtProcedure::FractalCircles => Procedure::FractalCircles,
        }
    }
}

fn main() -> ExitCode {
    match dispatch(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::FAILURE
        }
    }
}

fn dispatch(cli: Cli) -> anyhow::Result<()> {
    match cli.command {
        Command::Run { config, out_root, plots } => {
            let experiment = ExperimentConfig::load(&config)?;
            let validated = experiment.validate()?;
            let artifacts = runner::execute(&validated, out_root.as_deref(), plots)?;
            println!("wrote {}", artifacts.summary_path.display());
            for seed in &artifacts.seeds {
                let note = if seed.incomplete { "  (incomplete: environment fault)" } else { "" };
                println!("  seed {}: {}{note}", seed.seed, seed.metrics_path.display());
            }
            Ok(())
        }
        Command::Report { summaries } => {
            let table = report::report(&summaries)?;
            print!("{table}");
            Ok(())
        }
        Command::Art { procedure, depth, mask, out } => {
            let procedure: Procedure = procedure.into();
            let scaffold = build_drawing(procedure, depth);
            let drawing = match &mask {
                Some(path) => {
                    let text = fs::read_to_string(path)
                        .with_context(|| format!("cannot read mask {}", path.display()))?;
                    masked(&scaffold, &text)?
                }
                None => scaffold,
            };
            fs::write(&out, to_svg(&drawing))
                .with_context(|| format!("cannot write {}", out.display()))?;
            let report_path = out.with_extension("report.json");
            fs::write(&report_path, sidecar(procedure, depth, mask.is_some(), &drawing))
                .with_context(|| format!("cannot write {}", report_path.display()))?;
            println!(
                "wrote {} ({} segments, {} circles, {} arcs) and {}",
                out.display(),
                drawing.segment_count(),
                drawing.circle_count(),
                drawing.arc_count(),
                report_path.display()
            );
            Ok(())
        }
    }
}
