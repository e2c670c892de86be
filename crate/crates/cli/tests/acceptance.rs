use std::process::ExitCode;

use cbf::suite::{run_all, SuiteConfig};

fn main() -> ExitCode {
    let results = run_all(&SuiteConfig::default(), |c| println!("{}", c.line()));
    let failed = results.iter().filter(|c| !c.passed).count();
    println!("acceptance: {} of {} criteria passed", results.len() - failed, results.len());
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
