//! Command-line front end: dataset generation, assumption checks, solves,
//! sweeps, verification, and the nonlinear probe, all as thin deterministic
//! wrappers over the library.
//!
//! Exit codes: 0 success, 1 fatal validation failure, 2 I/O or parse
//! failure. Diagnostics go to stderr; results go to files.

mod commands;
mod config;

use std::path::PathBuf;
use std::process::ExitCode;

use alignlab_core::{exec, Error};
use clap::error::ErrorKind;
use clap::{Parser, Subcommand};

#[derive(Parser)]
#[command(
    name = "alignlab",
    version,
    about = "Linear multimodal alignment workbench: generate, check, solve, sweep, verify, probe"
)]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Generate a synthetic dataset directory (x1/x2/y1/y2 CSVs + meta).
    Gen {
        /// Output directory for the dataset files.
        #[arg(long)]
        out: PathBuf,
        /// Generator config JSON; defaults to the frozen linear fixture.
        #[arg(long)]
        config: Option<PathBuf>,
        /// Override the generator seed.
        #[arg(long)]
        seed: Option<u64>,
    },
    /// Measure the spectral and informativeness assumptions of a dataset.
    Check {
        #[arg(long)]
        data: PathBuf,
        #[arg(long)]
        out: PathBuf,
        /// Representation width the assumptions are checked at.
        #[arg(long)]
        k: Option<usize>,
        #[arg(long)]
        config: Option<PathBuf>,
    },
    /// Closed-form solve: encoder/head CSVs, losses, informativeness report.
    Solve {
        #[arg(long)]
        data: PathBuf,
        #[arg(long)]
        out: PathBuf,
        #[arg(long)]
        k: Option<usize>,
        /// Alignment weight.
        #[arg(long)]
        lambda: Option<f64>,
        #[arg(long)]
        config: Option<PathBuf>,
    },
    /// Independent iterative solve with restarts; adds a convergence trace.
    Oracle {
        #[arg(long)]
        data: PathBuf,
        #[arg(long)]
        out: PathBuf,
        #[arg(long)]
        k: Option<usize>,
        #[arg(long)]
        lambda: Option<f64>,
        /// Random restarts; the best final objective wins.
        #[arg(long)]
        restarts: Option<usize>,
        /// Seed for the restart initializations.
        #[arg(long)]
        seed: Option<u64>,
        #[arg(long)]
        config: Option<PathBuf>,
    },
    /// Solve across a λ grid and tabulate the prediction/alignment trade-off.
    Sweep {
        #[arg(long)]
        data: PathBuf,
        #[arg(long)]
        out: PathBuf,
        #[arg(long)]
        k: Option<usize>,
        /// Comma-separated λ grid, ascending, starting at 0.
        #[arg(long, value_delimiter = ',')]
        lambdas: Option<Vec<f64>>,
        /// Also write a static scatter plot of the trade-off.
        #[arg(long)]
        svg: bool,
        #[arg(long)]
        config: Option<PathBuf>,
    },
    /// Run the full verification bundle and write one structured report.
    Verify {
        #[arg(long)]
        data: PathBuf,
        #[arg(long)]
        out: PathBuf,
        #[arg(long)]
        k: Option<usize>,
        /// λ at which the closed form is compared to the iterative solver.
        #[arg(long)]
        lambda: Option<f64>,
        /// λ grid whose last entry drives the information-loss scenario.
        #[arg(long, value_delimiter = ',')]
        lambdas: Option<Vec<f64>>,
        #[arg(long)]
        seed: Option<u64>,
        #[arg(long)]
        restarts: Option<usize>,
        #[arg(long)]
        config: Option<PathBuf>,
    },
    /// Train the two-layer tanh probe across λ and seeds.
    Probe {
        #[arg(long)]
        data: PathBuf,
        #[arg(long)]
        out: PathBuf,
        /// Probe bottleneck width.
        #[arg(long)]
        k: Option<usize>,
        #[arg(long, value_delimiter = ',')]
        lambdas: Option<Vec<f64>>,
        /// Single training seed, replacing the default seed set.
        #[arg(long)]
        seed: Option<u64>,
        #[arg(long)]
        config: Option<PathBuf>,
    },
}

fn exit_code_for(e: &Error) -> u8 {
    match e {
        Error::Io { .. } | Error::Parse { .. } => 2,
        _ => 1,
    }
}

fn run(cmd: Cmd) -> Result<(), Error> {
    match cmd {
        Cmd::Gen { out, config, seed } => commands::gen(&out, config.as_deref(), seed),
        Cmd::Check { data, out, k, config } => commands::check(&data, &out, k, config.as_deref()),
        Cmd::Solve {
            data,
            out,
            k,
            lambda,
            config,
        } => commands::solve(&data, &out, k, lambda, config.as_deref()),
        Cmd::Oracle {
            data,
            out,
            k,
            lambda,
            restarts,
            seed,
            config,
        } => commands::oracle(&data, &out, k, lambda, restarts, seed, config.as_deref()),
        Cmd::Sweep {
            data,
            out,
            k,
            lambdas,
            svg,
            config,
        } => commands::sweep(&data, &out, k, lambdas, svg, config.as_deref()),
        Cmd::Verify {
            data,
            out,
            k,
            lambda,
            lambdas,
            seed,
            restarts,
            config,
        } => commands::verify(
            &data,
            &out,
            k,
            lambda,
            lambdas,
            seed,
            restarts,
            config.as_deref(),
        ),
        Cmd::Probe {
            data,
            out,
            k,
            lambdas,
            seed,
            config,
        } => commands::probe(&data, &out, k, lambdas, seed, config.as_deref()),
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let code = match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => 0,
                _ => 1,
            };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };

    if let Ok(v) = std::env::var("ALIGNLAB_THREADS") {
        match v.trim().parse::<usize>() {
            Ok(n) => exec::init_threads(n),
            Err(_) => {
                eprintln!("error: ALIGNLAB_THREADS must be a nonnegative integer, got {v:?}");
                return ExitCode::from(1);
            }
        }
    }

    match run(cli.cmd) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(exit_code_for(&e))
        }
    }
}
