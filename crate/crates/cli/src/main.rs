use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser};
use resonance_lab::commands::{AppError, Subcommand};
use resonance_lab::config::Overrides;
use resonance_lab::{execute, thread_cap, THREADS_ENV};

#[derive(Debug, Parser)]
#[command(name = "resonance-lab", version, about = "Resonance computations driven by config files")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, clap::Subcommand)]
enum Command {
    /// Driven damped oscillator: stored energy, phase and FBW overlay.
    Oscillator(RunArgs),
    /// Survival amplitude of a Lorentzian state, numeric against closed form.
    Decay(RunArgs),
    /// Transmission coefficient of a piecewise-constant potential.
    Scatter(RunArgs),
    /// Bound, antibound and resonance poles in the complex k plane.
    Poles(RunArgs),
    /// Transmission against the FBW superposition of the first resonances.
    #[command(name = "fbw-fit")]
    FbwFit(RunArgs),
    /// Complex-scaling theta trajectory of a resonance.
    Cscale(RunArgs),
    /// Darboux deformation seeded by a Gamow state.
    Darboux(RunArgs),
}

#[derive(Debug, Args)]
struct RunArgs {
    /// Configuration file.
    #[arg(long)]
    config: PathBuf,
    /// Output directory, overriding `[output] directory`.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Comma-separated subset of csv,json,svg.
    #[arg(long)]
    formats: Option<String>,
    /// Root-finding tolerance, overriding `[tolerances] root`
    #[arg(long)]
    tol_root: Option<f64>,
    /// Quadrature tolerance, overriding `[tolerances] quad`
    #[arg(long)]
    tol_quad: Option<f64>,
    /// Iteration cap, overriding `[tolerances] max_iter`
    #[arg(long)]
    max_iter: Option<usize>,
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = Cli::parse();
    let (sub, args) = match cli.command {
        Command::Oscillator(a) => (Subcommand::Oscillator, a),
        Command::Decay(a) => (Subcommand::Decay, a),
        Command::Scatter(a) => (Subcommand::Scatter, a),
        Command::Poles(a) => (Subcommand::Poles, a),
        Command::FbwFit(a) => (Subcommand::FbwFit, a),
        Command::Cscale(a) => (Subcommand::Cscale, a),
        Command::Darboux(a) => (Subcommand::Darboux, a),
    };
    match run(sub, args) {
        Ok(files) => {
            for f in files {
                println!("{}", f.display());
            }
            ExitCode::SUCCESS
        }
        Err(e) => {
            eprintln!("resonance-lab {}: {e}", sub.name());
            ExitCode::from(e.exit_code() as u8)
        }
    }
}

fn run(sub: Subcommand, args: RunArgs) -> Result<Vec<PathBuf>, AppError> {
    if let Some(n) = thread_cap(std::env::var(THREADS_ENV).ok().as_deref())? {
        rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global()
            .map_err(|e| AppError::Compute(format!("thread pool: {e}")))?;
    }
    let overrides = Overrides {
        out: args.out,
        formats: args.formats,
        tol_root: args.tol_root,
        tol_quad: args.tol_quad,
        max_iter: args.max_iter,
    };
    execute(sub, &args.config, &overrides)
}
