use std::process::ExitCode;

use clap::Parser;
use farm_sentinel::cli::{run, Cli};

fn main() -> ExitCode {
    ExitCode::from(run(Cli::parse()))
}
