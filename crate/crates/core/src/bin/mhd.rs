use std::io::ErrorKind;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use elsasser_mhd::{cli, Error};

#[derive(Parser)]
#[command(
    name = "mhd",
    version,
    about = "Pseudo-spectral Elsasser MHD runs and checks"
)]
struct Args {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run a trajectory and write the time series, checkpoint and summary
    Simulate {
        #[arg(long)]
        config: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Evaluate the smallness conditions on the initial data
    Check {
        #[arg(long)]
        config: PathBuf,
    },
    /// Run the oracle and inequality checks
    Verify {
        #[arg(long)]
        config: PathBuf,
    },
    /// Run a parameter sweep
    Sweep {
        #[arg(long)]
        config: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Print the norms of a checkpointed state
    Norms {
        #[arg(long)]
        checkpoint: PathBuf,
    },
}

fn main() -> ExitCode {
    let args = match Args::try_parse() {
        Ok(a) => a,
        Err(e) => {
            let _ = e.print();
            let code = if e.use_stderr() {
                cli::EXIT_USAGE
            } else {
                cli::EXIT_OK
            };
            return ExitCode::from(code as u8);
        }
    };
    let mut stdout = std::io::stdout().lock();
    let result = match &args.command {
        Command::Simulate { config, out } => cli::cmd_simulate(config, out.as_deref(), &mut stdout),
        Command::Check { config } => cli::cmd_check(config, &mut stdout),
        Command::Verify { config } => cli::cmd_verify(config, &mut stdout),
        Command::Sweep { config, out } => cli::cmd_sweep(config, out.as_deref(), &mut stdout),
        Command::Norms { checkpoint } => cli::cmd_norms(checkpoint, &mut stdout),
    };
    match result {
        Ok(code) => ExitCode::from(code as u8),
        Err(Error::Io { source, .. }) if source.kind() == ErrorKind::BrokenPipe => {
            ExitCode::SUCCESS
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(cli::EXIT_USAGE as u8)
        }
    }
}
