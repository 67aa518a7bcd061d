//! One line per acceptance criterion. Runs without the libtest harness so the
//! report is printed even when everything passes.

use std::process::ExitCode;

use gausscap_cli::acceptance::{self, Report};

/// Criterion 4 is expected to fail at q = 0.99 only.
fn unexpected(r: &Report) -> bool {
    if r.id == 4 {
        !(r.failures.len() == 1 && r.failures[0].starts_with("q=0.99:"))
    } else {
        !r.passed
    }
}

fn main() -> ExitCode {
    if std::env::args().any(|a| a == "--list") {
        println!("acceptance: test");
        return ExitCode::SUCCESS;
    }
    let jobs = std::thread::available_parallelism().map_or(1, |n| n.get());
    let reports = acceptance::run(None, jobs);
    for r in &reports {
        println!("{r}");
    }
    let bad: Vec<u8> = reports.iter().filter(|r| unexpected(r)).map(|r| r.id).collect();
    let passed = reports.iter().filter(|r| r.passed).count();
    println!("\nacceptance: {passed} of {} criteria pass", reports.len());
    if reports.len() != 10 || !bad.is_empty() {
        println!("unexpected failures: {bad:?}");
        return ExitCode::FAILURE;
    }
    ExitCode::SUCCESS
}
