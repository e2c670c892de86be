use std::process::ExitCode;

use cbf::cli::{failure_json, run, Cli};
use clap::Parser;

fn main() -> ExitCode {
    let cli = Cli::parse();
    let mut out = std::io::stdout().lock();
    match run(&cli, &mut out) {
        Ok(code) => ExitCode::from(code as u8),
        Err(e) => {
            eprintln!("{}", failure_json(&e));
            ExitCode::from(2)
        }
    }
}
