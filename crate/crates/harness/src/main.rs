use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use msmaxwell_harness::{execute, Experiment, HarnessError, RunConfig, Status};

#[derive(Parser, Debug)]
#[command(name = "msmaxwell", version, about = "Structure-preserving Maxwell experiments")]
struct Cli {
    #[command(subcommand)]
    command: Command,

    /// TOML experiment definition; built-in defaults when absent
    #[arg(long, global = true, value_name = "PATH")]
    config: Option<PathBuf>,

    /// Overrides the config seed
    #[arg(long, global = true)]
    seed: Option<u64>,

    /// Directory for traces, tables and sidecars
    #[arg(long, global = true, value_name = "DIR")]
    out: Option<PathBuf>,

    /// Overrides the config step count
    #[arg(long, global = true)]
    steps: Option<usize>,

    /// Suppress the report on stdout
    #[arg(long, global = true)]
    quiet: bool,
}

#[derive(Subcommand, Debug, Clone, Copy)]
enum Command {
    /// Identity, tableau and conservation checks
    Verify,
    /// Step the configured solver and write an energy trace
    Run,
    /// Split against unsplit formulation
    Equivalence,
    /// Plane-wave refinement study
    Convergence,
    /// Layer thickness sweep
    Absorption,
}

impl From<Command> for Experiment {
    fn from(c: Command) -> Self {
        match c {
            Command::Verify => Experiment::Verify,
            Command::Run => Experiment::Run,
            Command::Equivalence => Experiment::Equivalence,
            Command::Convergence => Experiment::Convergence,
            Command::Absorption => Experiment::Absorption,
        }
    }
}

fn load(cli: &Cli) -> Result<RunConfig, HarnessError> {
    let mut cfg = match &cli.config {
        Some(path) => RunConfig::load(path)?,
        None => RunConfig::default(),
    };
    if let Some(seed) = cli.seed {
        cfg.seed = seed;
    }
    if let Some(steps) = cli.steps {
        cfg.steps = steps;
    }
    cfg.validate()?;
    Ok(cfg)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = load(&cli).and_then(|cfg| execute(cli.command.into(), &cfg, cli.out.as_deref()));
    match result {
        Ok(outcome) => {
            if !cli.quiet {
                print!("{}", outcome.text);
            }
            match outcome.status {
                Status::Fail => ExitCode::from(1),
                _ => ExitCode::SUCCESS,
            }
        }
        Err(err) => {
            eprintln!("error: {err}");
            ExitCode::from(err.exit_code() as u8)
        }
    }
}
