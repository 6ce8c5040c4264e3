use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use propagate::commands::{CommandOutcome, DEFAULT_CLAUSES};
use propagate::{cmd_simulate, cmd_speed, cmd_sweep, cmd_verify, cmd_wave, config, CliError, RunConfig};
use propagate_core::analysis::Clause;
use propagate_core::Side;

#[derive(Parser)]
#[command(name = "propagate", version, about = "Spreading speeds, fronts and forced waves for shifting-habitat models")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct Common {
    /// Configuration file.
    #[arg(long)]
    config: PathBuf,
    /// Output directory; overrides `output.dir`.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Subcommand)]
enum Command {
    /// Spreading speed and minimizing decay rate for one side.
    Speed {
        #[command(flatten)]
        common: Common,
        #[arg(long, default_value = "plus")]
        side: Side,
    },
    /// Run the configured simulation and dump the trajectory.
    Simulate {
        #[command(flatten)]
        common: Common,
    },
    /// Relax to the forced wave (steady state for systems).
    Wave {
        #[command(flatten)]
        common: Common,
    },
    /// Evaluate the asymptotic clauses on one run.
    Verify {
        #[command(flatten)]
        common: Common,
        /// Comma-separated subset of spreading, annihilation, wave, attractivity, sandwich.
        #[arg(long, value_delimiter = ',')]
        clauses: Option<Vec<Clause>>,
        /// Exit with status 4 when any clause fails.
        #[arg(long)]
        strict: bool,
    },
    /// Repeat the run over `analysis.sweep_values`.
    Sweep {
        #[command(flatten)]
        common: Common,
        /// Concurrent runs.
        #[arg(long, env = "PROPAGATE_JOBS")]
        jobs: Option<usize>,
    },
}

fn load(common: &Common) -> Result<RunConfig, CliError> {
    let mut cfg = config::load_file(&common.config)?;
    if let Some(out) = &common.out {
        cfg.output_dir = out.clone();
    }
    for w in &cfg.warnings {
        eprintln!("warning: {w}");
    }
    Ok(cfg)
}

fn dispatch(cmd: Command) -> Result<(CommandOutcome, bool), CliError> {
    Ok(match cmd {
        Command::Speed { common, side } => (cmd_speed(&load(&common)?, side)?, false),
        Command::Simulate { common } => (cmd_simulate(&load(&common)?)?, false),
        Command::Wave { common } => (cmd_wave(&load(&common)?)?, false),
        Command::Verify { common, clauses, strict } => {
            let clauses = clauses.unwrap_or_else(|| DEFAULT_CLAUSES.to_vec());
            (cmd_verify(&load(&common)?, &clauses)?, strict)
        }
        Command::Sweep { common, jobs } => {
            let jobs = jobs
                .unwrap_or_else(|| std::thread::available_parallelism().map_or(1, |n| n.get()));
            (cmd_sweep(&load(&common)?, jobs)?, false)
        }
    })
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match dispatch(cli.command) {
        Ok((outcome, strict)) => {
            for line in &outcome.stdout {
                println!("{line}");
            }
            if strict && outcome.verdict_failed {
                ExitCode::from(4)
            } else {
                ExitCode::SUCCESS
            }
        }
        Err(e) => {
            eprintln!("{}", e.record());
            ExitCode::from(e.exit_code())
        }
    }
}
