//! One pass/fail line per acceptance criterion. Tolerances live in
//! `specsum_core::verify`; this target only reports and sets the exit code.

use std::process::ExitCode;

use specsum_core::verify::{run_criterion, CRITERIA};

fn main() -> ExitCode {
    let mut failed = 0;
    for (id, _) in CRITERIA {
        let result = run_criterion(id).expect("listed criteria exist");
        println!("{}", result.line());
        if !result.passed {
            failed += 1;
        }
    }
    println!("acceptance: {} passed, {failed} failed", CRITERIA.len() - failed);
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
