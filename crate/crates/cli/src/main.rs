//! `smoothip` command-line front end.
//!
//! Exit codes: 0 success, 1 other failure, 2 unreadable or malformed input,
//! 3 the LP failed at every error budget.

mod args;
mod commands;
mod input;

use std::process::ExitCode;

use clap::Parser;

use args::{Cli, Command};
use commands::AllLpFailed;
use input::BadInput;

fn exit_code(err: &anyhow::Error) -> u8 {
    if err.chain().any(|e| e.is::<AllLpFailed>()) {
        return 3;
    }
    let parse_like = err.chain().any(|e| {
        e.is::<BadInput>()
            || matches!(
                e.downcast_ref::<smoothip::Error>(),
                Some(smoothip::Error::Parse { .. })
            )
    });
    if parse_like {
        2
    } else {
        1
    }
}

#[cfg(feature = "parallel")]
fn configure_threads(threads: usize) -> anyhow::Result<()> {
    if threads > 0 {
        rayon::ThreadPoolBuilder::new()
            .num_threads(threads)
            .build_global()?;
    }
    Ok(())
}

#[cfg(not(feature = "parallel"))]
fn configure_threads(_: usize) -> anyhow::Result<()> {
    Ok(())
}

fn run(cli: &Cli) -> anyhow::Result<()> {
    configure_threads(cli.threads)?;
    let seq = cli.sequential;
    match &cli.command {
        Command::Gen(a) => commands::gen(a),
        Command::Solve(a) => commands::solve_cmd(a, seq),
        Command::Sweep(a) => commands::sweep(a, seq),
        Command::Verify(a) => commands::verify(a, seq),
        Command::Erm(a) => commands::erm(a, seq),
    }
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = Cli::parse();
    match run(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(exit_code(&e))
        }
    }
}
