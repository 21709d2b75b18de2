//! Runs every acceptance criterion at its stated tolerance and prints one
//! PASS/FAIL line per criterion. Built without the libtest harness so the
//! lines always reach the terminal.

use std::process::ExitCode;

use gaq_cli::selftest::{run_selftest, CRITERIA};

fn main() -> ExitCode {
    println!(
        "acceptance: {} criteria plus the determinism rerun",
        CRITERIA.len()
    );
    let report = run_selftest(None, |r| println!("{}", r.line()));
    let failed: Vec<&str> = report
        .results
        .iter()
        .filter(|r| !r.passed)
        .map(|r| r.key)
        .collect();
    let complete = report.results.len() == CRITERIA.len() + 1;
    println!(
        "acceptance: {}/{} passed in {:.1} s",
        report.results.len() - failed.len(),
        report.results.len(),
        report.seconds
    );
    if failed.is_empty() && complete {
        ExitCode::SUCCESS
    } else {
        eprintln!("failing criteria: {failed:?}");
        ExitCode::FAILURE
    }
}
