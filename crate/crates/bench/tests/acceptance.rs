//! Runs every acceptance criterion and prints one line per criterion.

use std::process::ExitCode;

use taylorsolve_bench::acceptance::run_all;

fn main() -> ExitCode {
    // libtest flags such as --nocapture are accepted and ignored; `--list`
    // must not trigger a full run.
    if std::env::args().any(|a| a == "--list") {
        return ExitCode::SUCCESS;
    }
    let reports = run_all(0);
    for r in &reports {
        println!("{r}");
    }
    let passed = reports.iter().filter(|r| r.passed).count();
    println!("{passed}/{} criteria passed", reports.len());
    if passed == reports.len() {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
