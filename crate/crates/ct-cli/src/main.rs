//! `ct`: batch pipeline for concurrence-topology analysis.
//!
//! Exit codes: 0 success, 1 usage, 2 I/O or parse failure, 3 numeric or
//! convergence failure.

mod args;
mod run;

use clap::Parser;

use args::{Cli, Command};
use run::RunError;

fn main() {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            // help/version are not errors
            use clap::error::ErrorKind;
            let code = match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => 0,
                _ => 1,
            };
            let _ = e.print();
            std::process::exit(code);
        }
    };

    let result = match &cli.command {
        Command::Counts(a) => run::cmd_counts(a),
        Command::Analyze(a) => run::cmd_analyze(a, false),
        Command::Localize(a) => run::cmd_analyze(a, true),
        Command::Simulate(a) => run::cmd_simulate(a),
        Command::Bootstrap(a) => run::cmd_bootstrap(a),
        Command::Compare(a) => run::cmd_compare(a),
        Command::Plot(a) => run::cmd_plot(a),
    };

    match result {
        Ok(()) => {}
        Err(RunError::Usage(msg)) => {
            eprintln!("error: {msg}");
            std::process::exit(1);
        }
        Err(RunError::IoOrParse(msg)) => {
            eprintln!("error: {msg}");
            std::process::exit(2);
        }
        Err(RunError::Numeric(msg)) => {
            eprintln!("error: {msg}");
            std::process::exit(3);
        }
    }
}
