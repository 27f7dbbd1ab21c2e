use std::io::Write;
use std::process::ExitCode;

use clap::Parser;
use pc_gauge::cli::{run, Cli};

fn main() -> ExitCode {
    let result = run(&Cli::parse());
    print!("{}", result.stdout);
    eprint!("{}", result.stderr);
    let _ = std::io::stdout().flush();
    ExitCode::from(result.code as u8)
}
