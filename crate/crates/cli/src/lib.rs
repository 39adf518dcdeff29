//! Experiment runner behind the `favedge` binary.

pub mod cli;
pub mod commands;
pub mod config;
pub mod error;
pub mod experiment;
pub mod output;

pub use cli::{Cli, Command};
pub use config::RunConfig;
pub use error::{CliError, Result};

/// Parses arguments, runs the command, returns the process exit code.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    use clap::Parser;

    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return code;
        }
    };
    let result = match &cli.command {
        Command::Simulate(a) => a
            .resolve()
            .and_then(|c| commands::cmd_simulate(&c, a.replica)),
        Command::Sweep(a) => a.resolve().and_then(|c| commands::cmd_sweep(&c)),
        Command::Invlt(a) => a.resolve().and_then(|c| commands::cmd_invlt(&c)),
        Command::Enumerate(a) => commands::cmd_enumerate(a),
        Command::Verify(a) => commands::cmd_verify(a),
    };
    match result {
        Ok(msg) => {
            println!("{msg}");
            0
        }
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    }
}
