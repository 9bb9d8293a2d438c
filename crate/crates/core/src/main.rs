use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use pairstate::pipeline::{
    run_metrics, run_simulate, run_sweep, run_tomo, sibling_path, Mode, PipelineError, RunConfig,
};

#[derive(Debug, Parser)]
#[command(name = "pairstate", version, about = "Two-photon polarization tomography and multi-pair source models")]
struct Cli {
    /// Random seed; overrides `seed` in the config.
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Config override as key=value, e.g. source.alpha=0.02. Repeatable.
    #[arg(long = "set", value_name = "KEY=VALUE", global = true)]
    overrides: Vec<String>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Reconstruct states from 16-row count files.
    Tomo {
        #[arg(required = true)]
        files: Vec<PathBuf>,
        #[arg(long)]
        out: PathBuf,
        #[arg(long)]
        config: Option<PathBuf>,
    },
    /// Write synthetic count files from the multi-pair model.
    Simulate {
        #[arg(long)]
        config: PathBuf,
        #[arg(long)]
        out: PathBuf,
    },
    /// Tabulate g, tangle, linear entropy and fidelity over η and power.
    Sweep {
        #[arg(long)]
        config: PathBuf,
        #[arg(long)]
        out: PathBuf,
    },
    /// Validate a density-matrix file and print its metrics.
    Metrics { file: PathBuf },
}

fn build_config(cli: &Cli, file: Option<&PathBuf>) -> Result<RunConfig, PipelineError> {
    let mut config = match file {
        Some(path) => RunConfig::load(path)?,
        None => RunConfig::default(),
    };
    for assignment in &cli.overrides {
        config.apply_override(assignment)?;
    }
    if let Some(seed) = cli.seed {
        config.seed = seed;
    }
    Ok(config)
}

fn run(cli: &Cli) -> Result<i32, PipelineError> {
    match &cli.command {
        Command::Tomo { files, out, config } => {
            let mut cfg = build_config(cli, config.as_ref())?;
            cfg.mode = Some(Mode::Tomo);
            cfg.inputs = files.clone();
            cfg.output = Some(out.clone());
            let outcome = run_tomo(&cfg)?;
            for r in &outcome.records {
                println!("{}: {}", r.label, r.metrics.block());
            }
            for f in &outcome.failures {
                eprintln!("error: {}", f.error);
            }
            println!(
                "{} reconstructed, {} failed; summary in {}",
                outcome.records.len(),
                outcome.failures.len(),
                out.join("summary.csv").display()
            );
            Ok(outcome.exit_code())
        }
        Command::Simulate { config, out } => {
            let mut cfg = build_config(cli, Some(config))?;
            cfg.mode = Some(Mode::Simulate);
            cfg.output = Some(out.clone());
            let points = run_simulate(&cfg)?;
            println!("wrote {} count files to {}", points.len(), out.display());
            Ok(0)
        }
        Command::Sweep { config, out } => {
            let mut cfg = build_config(cli, Some(config))?;
            cfg.mode = Some(Mode::Sweep);
            cfg.output = Some(out.clone());
            let sweep = run_sweep(&cfg)?;
            println!(
                "wrote {} rows to {} (also {}, {})",
                sweep.rows.len(),
                out.display(),
                sibling_path(out, "trajectory").display(),
                sibling_path(out, "fidelity").display()
            );
            Ok(0)
        }
        Command::Metrics { file } => {
            let mut cfg = build_config(cli, None)?;
            cfg.mode = Some(Mode::Metrics);
            cfg.inputs = vec![file.clone()];
            println!("{}", run_metrics(&cfg)?.block());
            Ok(0)
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(code) => ExitCode::from(code as u8),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
