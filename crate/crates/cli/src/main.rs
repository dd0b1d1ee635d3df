use std::process::ExitCode;

use clap::Parser;
use matdisc_cli::Cli;

fn main() -> ExitCode {
    matdisc_cli::main_with(Cli::parse())
}
